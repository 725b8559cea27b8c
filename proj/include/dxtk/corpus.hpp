#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dxtk/generator.hpp"
#include "dxtk/taxonomy.hpp"

namespace dxtk {

struct DiagnosticCase {
  std::string id;
  std::string image_ref;  // opaque; bytes are never inspected
  std::string rationale;
  std::string diagnosis;
};

enum class TrajectoryKind { type1, type2, type3 };
std::optional<TrajectoryKind> parse_trajectory_kind(std::string_view name);
std::string_view to_string(TrajectoryKind kind);

struct Trajectory {
  std::string id;
  TrajectoryKind kind = TrajectoryKind::type1;
  std::string image_ref;
  std::string primary_rationale;
  std::string primary_diagnosis;  // canonical
  std::optional<std::string> differential_rationale;
  std::optional<std::string> differential_diagnosis;  // canonical
  std::optional<std::string> comparison;
  std::string final_diagnosis;  // canonical
  TaxonomyAnnotation annotation;
};

struct SkippedCase {
  std::string case_id;
  std::string reason;
};

struct SynthesisResult {
  std::vector<Trajectory> trajectories;
  std::vector<SkippedCase> skipped;

  std::size_t skip_count() const { return skipped.size(); }
};

CaseIndex build_case_index(std::span<const DiagnosticCase> cases);

// Direct single-step traces: one per case, final diagnosis = case diagnosis.
SynthesisResult synth_type1(std::span<const DiagnosticCase> cases,
                            const TaxonomyTree& tree);

// Differential-comparison traces without revision: pairs each case with a DDX
// neighbor (seeded random alternative when the search fails), asks the
// generator to contrast the rationales anchored on the primary diagnosis, and
// keeps the primary as final.
SynthesisResult synth_type2(std::span<const DiagnosticCase> cases,
                            const TaxonomyTree& tree, const DdxGraph& ddx,
                            TextGenerator& generator, std::uint64_t seed);

// Reflective-revision traces: identical pairing, but the comparison is
// anchored on the differential and the final diagnosis is revised to it.
SynthesisResult synth_type3(std::span<const DiagnosticCase> cases,
                            const TaxonomyTree& tree, const DdxGraph& ddx,
                            TextGenerator& generator, std::uint64_t seed);

struct SftRecord {
  std::string image_ref;
  std::string prompt;
  std::string response;
};

// "X is a subtype of <parents nearest first>, and is generally classified as
// <malignancy>."; reduces to the malignancy clause when there are no ancestors.
std::string hierarchy_sentence(std::string_view diagnosis,
                               const TaxonomyAnnotation& annotation);

// Renders the kind-matched instruction template and a tagged response whose
// diagnosis block names the final diagnosis.
SftRecord render_sft(const Trajectory& trajectory);

}  // namespace dxtk
