#pragma once

#include <string>
#include <string_view>

namespace dxtk::prompts {

// Instruction shown with direct single-diagnosis training records.
inline constexpr std::string_view kSftDirect =
    "You are a medical vision-language assistant specializing in dermatology.\n"
    "Given the dermatology image, analyze the visual findings and provide a "
    "structured diagnosis following this format:\n"
    "\n"
    "<thinking>Describe the key clinical features, visual observations, and the "
    "diagnostic rationale that support the diagnosis.</thinking>\n"
    "<diagnosis>Provide the most likely and specific fine-grained diagnosis, and "
    "briefly classify the condition (benign or malignant) along with any relevant "
    "clinical taxonomy.</diagnosis>\n"
    "\n"
    "Ensure your response is medically accurate, concise, and strictly follows "
    "the specified format.";

// Instruction shown with differential-comparison training records.
inline constexpr std::string_view kSftDifferential =
    "You are a medical vision-language assistant specializing in dermatology.\n"
    "Given the dermatology image, analyze the visual findings and provide a "
    "structured diagnostic reasoning following this format:\n"
    "\n"
    "<thinking>\n"
    "Begin by describing the characteristic clinical features and visual "
    "observations of the lesion.\n"
    "Based on these features, propose the most likely diagnosis.\n"
    "Then identify at least one plausible alternative diagnosis and describe its "
    "defining features.\n"
    "Compare the observed lesion with these alternatives and explain step by step "
    "why the final diagnosis is more consistent with the findings.\n"
    "Conclude the reasoning with the single condition that best matches the "
    "clinical presentation.\n"
    "</thinking>\n"
    "\n"
    "<diagnosis>\n"
    "Provide only the single most likely and specific fine-grained diagnosis.\n"
    "Also briefly classify the condition (benign or malignant) and indicate any "
    "relevant clinical taxonomy (e.g., subtype or disease family).\n"
    "Do not include explanations, multiple options, or extra punctuation.\n"
    "</diagnosis>\n"
    "\n"
    "Ensure your response is medically accurate, concise, and strictly follows "
    "the specified format.";

// Multiple-choice prompt used for reward-driven training; asks for the option
// plus the lesion condition so both reward heads can be scored.
inline std::string rl_training(std::string_view question) {
  std::string out;
  out += "You are a medical vision-language assistant specializing in dermatology. "
         "Given the dermatology image, answer: ";
  out += question;
  out += "\nProvide necessary reasoning and only answer the question in the "
         "following format:\n"
         "<thinking>Describe the key clinical features and visual observations "
         "that support your diagnosis.</thinking>\n"
         "<final diagnosis>Provide only the single most likely option without "
         "reasoning. If multiple options are plausible, always choose the most "
         "fine-grained (i.e., most specific or detailed) option available among "
         "them. Also provide the lesion condition (benign, malignant or "
         "precancerous in situ). </final diagnosis>\n"
         "Ensure your response is medically accurate, concise, and strictly "
         "follows the specified format.";
  return out;
}

// Multiple-choice prompt used at evaluation time; `letters` is the
// slash-joined letter list, e.g. "A/B/C/D".
inline std::string disease_eval(std::string_view question, std::string_view letters) {
  std::string out;
  out += "You are a medical vision-language assistant specializing in dermatology. "
         "Given the dermatology image, answer: ";
  out += question;
  out += "\nProvide necessary reasoning and only answer the question in the "
         "following format:\n"
         "<thinking>Describe the key clinical features and visual observations "
         "that support your diagnosis.</thinking>\n"
         "<final diagnosis>Provide only the single most likely option (";
  out += letters;
  out += ") without reasoning. If multiple options are plausible, always choose "
         "the most fine-grained (i.e., most specific or detailed) option "
         "available among them. </final diagnosis>\n"
         "Ensure your response is medically accurate, concise, and strictly "
         "follows the specified format.";
  return out;
}

// Fixed three-way lesion condition prompt.
inline constexpr std::string_view kLesionCondition =
    "You are a medical vision-language assistant specializing in dermatology.\n"
    "Given the dermatology image, answer: What type of lesion condition (benign, "
    "malignant or precancerous in situ) is present in this image?\n"
    "A: benign B: malignant C: precancerous in situ\n"
    "Provide necessary reasoning and only answer the question in the following "
    "format:\n"
    "<thinking>Describe the key clinical features and visual observations that "
    "support your diagnosis.</thinking>\n"
    "<final diagnosis>Only output one option: A, B, or C.</final diagnosis>\n"
    "Ensure your response is medically accurate, concise, and strictly follows "
    "the specified format.";

inline constexpr std::string_view kDefaultQuestionStem =
    "What type of abnormality is present in this image?";

// Prompt handed to the comparison generator. The anchor diagnosis is quoted so
// the deterministic mock can recover it.
inline std::string comparator(std::string_view primary_rationale,
                              std::string_view differential_rationale,
                              std::string_view anchor_diagnosis) {
  std::string out;
  out += "You are assisting with dermatological differential diagnosis.\n";
  out += "Primary rationale: ";
  out += primary_rationale;
  out += "\nDifferential rationale: ";
  out += differential_rationale;
  out += "\nBy contrasting the findings above, explain concisely why \"";
  out += anchor_diagnosis;
  out += "\" best matches the observed lesion.";
  return out;
}

}  // namespace dxtk::prompts
