#include "dxtk/corpus.hpp"

#include <algorithm>
#include <map>

#include "dxtk/canonical.hpp"
#include "dxtk/errors.hpp"
#include "dxtk/prompts.hpp"
#include "dxtk/rng.hpp"

namespace dxtk {

namespace {

std::vector<const DiagnosticCase*> sorted_by_id(std::span<const DiagnosticCase> cases) {
  std::vector<const DiagnosticCase*> out;
  out.reserve(cases.size());
  for (const auto& c : cases) out.push_back(&c);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto* a, const auto* b) { return a->id < b->id; });
  return out;
}

// Lowest-id case per canonical diagnosis: the deterministic pick when several
// cases share the differential diagnosis.
std::map<std::string, const DiagnosticCase*> representative_cases(
    const std::vector<const DiagnosticCase*>& ordered) {
  std::map<std::string, const DiagnosticCase*> out;
  for (const auto* c : ordered) {
    out.emplace(canonical_label(c->diagnosis), c);  // first by id order wins
  }
  return out;
}

// Shared pairing + generation logic of the two differential synthesizers.
// `revise` selects the anchor of the comparison and the final diagnosis.
SynthesisResult synth_differential(std::span<const DiagnosticCase> cases,
                                   const TaxonomyTree& tree, const DdxGraph& ddx,
                                   TextGenerator& generator, std::uint64_t seed,
                                   bool revise) {
  SynthesisResult result;
  const auto ordered = sorted_by_id(cases);
  const auto representatives = representative_cases(ordered);
  const CaseIndex index = build_case_index(cases);

  std::vector<std::string> all_diagnoses;
  for (const auto& [diagnosis, rep] : representatives) all_diagnoses.push_back(diagnosis);

  const TrajectoryKind kind = revise ? TrajectoryKind::type3 : TrajectoryKind::type2;
  const std::string suffix = revise ? "-t3" : "-t2";

  for (const auto* c : ordered) {
    const std::string primary = canonical_label(c->diagnosis);
    if (!tree.contains(primary)) {
      result.skipped.push_back({c->id, "unknown diagnosis \"" + primary + "\""});
      continue;
    }

    std::optional<std::string> differential =
        resolve_ddx_neighbor(primary, ddx, tree, index);
    if (!differential) {
      // Seeded per-case stream, so the draw does not depend on how many
      // earlier cases needed the fallback.
      std::vector<std::string> alternatives;
      for (const auto& d : all_diagnoses) {
        if (d != primary) alternatives.push_back(d);
      }
      if (alternatives.empty()) {
        result.skipped.push_back(
            {c->id, "no alternative diagnosis available for fallback sampling"});
        continue;
      }
      Rng rng(mix_seed(seed, c->id));
      differential = alternatives[rng.uniform_index(alternatives.size())];
    }

    const auto rep_it = representatives.find(*differential);
    if (rep_it == representatives.end()) {
      result.skipped.push_back(
          {c->id, "no case with differential diagnosis \"" + *differential + "\""});
      continue;
    }
    const DiagnosticCase& diff_case = *rep_it->second;

    const std::string final_diagnosis = revise ? *differential : primary;
    if (!tree.contains(final_diagnosis)) {
      result.skipped.push_back(
          {c->id, "final diagnosis \"" + final_diagnosis + "\" not in taxonomy"});
      continue;
    }

    const std::string anchor = revise ? *differential : primary;
    std::string comparison;
    try {
      comparison = generator.generate(
          prompts::comparator(c->rationale, diff_case.rationale, anchor));
    } catch (const GeneratorError& e) {
      result.skipped.push_back({c->id, std::string("generator failure: ") + e.what()});
      continue;
    }

    Trajectory traj;
    traj.id = c->id + suffix;
    traj.kind = kind;
    traj.image_ref = c->image_ref;
    traj.primary_rationale = c->rationale;
    traj.primary_diagnosis = primary;
    traj.differential_rationale = diff_case.rationale;
    traj.differential_diagnosis = *differential;
    traj.comparison = std::move(comparison);
    traj.final_diagnosis = final_diagnosis;
    traj.annotation = tree.path_of(final_diagnosis);
    result.trajectories.push_back(std::move(traj));
  }
  return result;
}

}  // namespace

std::optional<TrajectoryKind> parse_trajectory_kind(std::string_view name) {
  const std::string c = canonical_label(name);
  if (c == "type1") return TrajectoryKind::type1;
  if (c == "type2") return TrajectoryKind::type2;
  if (c == "type3") return TrajectoryKind::type3;
  return std::nullopt;
}

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::type1: return "type1";
    case TrajectoryKind::type2: return "type2";
    case TrajectoryKind::type3: return "type3";
  }
  return "type1";
}

CaseIndex build_case_index(std::span<const DiagnosticCase> cases) {
  CaseIndex index;
  for (const auto& c : cases) index.add(c.diagnosis);
  return index;
}

SynthesisResult synth_type1(std::span<const DiagnosticCase> cases,
                            const TaxonomyTree& tree) {
  SynthesisResult result;
  for (const auto* c : sorted_by_id(cases)) {
    const std::string diagnosis = canonical_label(c->diagnosis);
    if (!tree.contains(diagnosis)) {
      result.skipped.push_back({c->id, "unknown diagnosis \"" + diagnosis + "\""});
      continue;
    }
    Trajectory traj;
    traj.id = c->id + "-t1";
    traj.kind = TrajectoryKind::type1;
    traj.image_ref = c->image_ref;
    traj.primary_rationale = c->rationale;
    traj.primary_diagnosis = diagnosis;
    traj.final_diagnosis = diagnosis;
    traj.annotation = tree.path_of(diagnosis);
    result.trajectories.push_back(std::move(traj));
  }
  return result;
}

SynthesisResult synth_type2(std::span<const DiagnosticCase> cases,
                            const TaxonomyTree& tree, const DdxGraph& ddx,
                            TextGenerator& generator, std::uint64_t seed) {
  return synth_differential(cases, tree, ddx, generator, seed, /*revise=*/false);
}

SynthesisResult synth_type3(std::span<const DiagnosticCase> cases,
                            const TaxonomyTree& tree, const DdxGraph& ddx,
                            TextGenerator& generator, std::uint64_t seed) {
  return synth_differential(cases, tree, ddx, generator, seed, /*revise=*/true);
}

std::string hierarchy_sentence(std::string_view diagnosis,
                               const TaxonomyAnnotation& annotation) {
  std::string out = capitalize_first(diagnosis);
  if (annotation.length() >= 2) {
    out += " is a subtype of ";
    for (std::size_t i = annotation.length() - 1; i > 0; --i) {
      out += annotation.path[i - 1];
      out += ", and ";
    }
    out += "is generally classified as ";
  } else {
    out += " is generally classified as ";
  }
  out += to_string(annotation.malignancy);
  out += '.';
  return out;
}

SftRecord render_sft(const Trajectory& trajectory) {
  SftRecord record;
  record.image_ref = trajectory.image_ref;

  const std::string sentence =
      hierarchy_sentence(trajectory.final_diagnosis, trajectory.annotation);

  if (trajectory.kind == TrajectoryKind::type1) {
    record.prompt = std::string(prompts::kSftDirect);
    record.response = "<thinking>" + trajectory.primary_rationale + "</thinking>\n" +
                      "<diagnosis>" + trajectory.final_diagnosis + ", " + sentence +
                      "</diagnosis>";
    return record;
  }

  record.prompt = std::string(prompts::kSftDifferential);
  const std::string& differential = trajectory.differential_diagnosis.value();
  std::string thinking = "Based on the rule: " + trajectory.primary_rationale +
                         " We can give a primary diagnosis that " +
                         trajectory.primary_diagnosis +
                         ". Considering the differential diagnosis for " +
                         trajectory.primary_diagnosis + ", namely " + differential +
                         ", we compare against the diagnostic rule for " + differential +
                         ": " + trajectory.differential_rationale.value() + "\n" +
                         trajectory.comparison.value() +
                         " Therefore, the most likely condition corresponds to \"" +
                         trajectory.final_diagnosis + "\".";
  record.response = "<thinking>\n" + thinking + "\n</thinking>\n" + "<diagnosis>" +
                    trajectory.final_diagnosis + ". " + sentence + "</diagnosis>";
  return record;
}

}  // namespace dxtk
