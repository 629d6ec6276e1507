#pragma once

#include <string_view>

namespace attnrag {

// Prompt sent to the assistant model to turn a question into an answer hint
// prefix. `{question}` is the only substitution slot. Mirrored by
// assets/prefix_prompt.txt; a test keeps the two byte-identical.
inline constexpr std::string_view kPrefixPromptTemplate =
    "You are a formatting assistant. Given a question, your task is to generate a "
    "corresponding answering format. The format should maintain the same structure as "
    "the question but transform it into an incomplete answer template. If it is "
    "impossible to generate a format, return \"None\".\n"
    "\n"
    "The format is like an complete answer, but truncated before the key word, and the "
    "key word is not included in the format.\n"
    "\n"
    "For instance, if the question is \"Where is Daniel?\", the format should be "
    "\"Daniel is in the\", as the next word is the key word.\n"
    "\n"
    "Note: For yes/no questions, such as \"Is Tom here?\", return \"None\" because "
    "these questions are typically answered with \"yes\" or \"no\" and do not have a "
    "natural continuation that leads to a single keyword.\n"
    "\n"
    "Examples:\n"
    "\n"
    "1. Question: Where is Daniel?\n"
    "\n"
    "   Format: Daniel is in the\n"
    "\n"
    "2. Question: What time is it?\n"
    "\n"
    "   Format: It is\n"
    "\n"
    "3. Question: Who is responsible for this?\n"
    "\n"
    "   Format: The person responsible for this is\n"
    "\n"
    "4. Question: Which film was released more recently, Dance With A Stranger or "
    "Miley Naa Miley Hum?\n"
    "\n"
    "   Format: The film released more recently was\n"
    "\n"
    "5. Question: Is Tom here?\n"
    "\n"
    "   Format: None\n"
    "\n"
    "In generation , you should only return the format, not any other text.\n"
    "\n"
    "Now, here's a new question:\n"
    "\n"
    "Question: {question}\n"
    "Format:";

// Prompt handed to the attention provider for one chunk. Slots: `{chunk}`
// (once), `{question}` (once), `{prefix_hint}` (three times). The prompt ends
// with the hint prefix so the next decoded token is the focal token.
// Mirrored by assets/anchor_prompt.txt.
inline constexpr std::string_view kAnchorPromptTemplate =
    "You will be given a long context begin with 'Context:', a question begin with "
    "'Question:', and a hint begin with 'Hint:'. Please answer the question.\n"
    "Context: {chunk}\n"
    "Hint: You should answer begin with {prefix_hint}, if there is no useful "
    "information in the context for the question in the context and you really don't "
    "know the answer, just answer {prefix_hint} none.\n"
    "Question: {question}\n"
    "Answer:\n"
    "{prefix_hint}";

// Prompt used by the bundled LLM judge. Slots: `{question}`, `{gold}`,
// `{prediction}`. This is the artifact's own judging prompt; scores produced
// with it are not comparable to numbers obtained with other judges.
inline constexpr std::string_view kJudgePromptTemplate =
    "You are grading an answer to a question.\n"
    "Question: {question}\n"
    "Gold answer: {gold}\n"
    "Proposed answer: {prediction}\n"
    "Reply with exactly one word: \"yes\" if the proposed answer conveys the gold "
    "answer (different phrasing is fine), otherwise \"no\".";

}  // namespace attnrag
