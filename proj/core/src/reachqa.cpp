#include "spreach/reachqa.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "spreach/errors.hpp"

namespace spreach {

namespace {

constexpr std::string_view kTemplates[] = {
    "Is the [Object] in the robot's reachable space?",
    "Is the [Object] outside the robot's reachable space?",
    "Which is reachable: [A] or [B]?",
    "Can the robot grasp the [Object] from its current position?",
    "Is the area around the [Object] within reach?",
};

// Fixed answer strings per (template, reachable?) — see the README table.
std::string answer_for(TemplateId id, bool object_reachable,
                       const std::string& reachable_label) {
  switch (id) {
    case TemplateId::kReachQuery:
    case TemplateId::kRegionQuery:
      return object_reachable ? "Yes, it is." : "No, it is not.";
    case TemplateId::kInverseQuery:
      return object_reachable ? "No, it is not." : "Yes, it is.";
    case TemplateId::kActionGated:
      return object_reachable ? "Yes, it can." : "No, it cannot.";
    case TemplateId::kComparative:
      return "The " + reachable_label + ".";
  }
  throw InvalidArgumentError("unknown template id");
}

std::string substitute(std::string_view tmpl, std::string_view placeholder,
                       std::string_view value) {
  std::string out(tmpl);
  const auto pos = out.find(placeholder);
  if (pos != std::string::npos) out.replace(pos, placeholder.size(), value);
  return out;
}

std::vector<std::string> tokens_of(const std::string& normalized) {
  std::vector<std::string> tokens;
  std::istringstream in(normalized);
  std::string t;
  while (in >> t) tokens.push_back(t);
  return tokens;
}

bool contains_token_run(const std::vector<std::string>& haystack,
                        const std::vector<std::string>& needle) {
  if (needle.empty()) return false;
  if (needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), haystack.begin() + i)) return true;
  }
  return false;
}

using nlohmann::ordered_json;

std::string require_string(const ordered_json& obj, const char* field, std::size_t line) {
  if (!obj.contains(field) || !obj.at(field).is_string()) {
    throw FormatError("jsonl line " + std::to_string(line) + ": missing string field \"" +
                      field + "\"");
  }
  return obj.at(field).get<std::string>();
}

int require_int(const ordered_json& obj, const char* field, std::size_t line) {
  if (!obj.contains(field) || !obj.at(field).is_number_integer()) {
    throw FormatError("jsonl line " + std::to_string(line) + ": missing integer field \"" +
                      field + "\"");
  }
  return obj.at(field).get<int>();
}

}  // namespace

std::string_view to_string(Reachability r) {
  switch (r) {
    case Reachability::kReachable: return "reachable";
    case Reachability::kUnreachable: return "unreachable";
    case Reachability::kIndeterminate: return "indeterminate";
  }
  return "?";
}

ReachLabel object_reachability(const SPMap& map, const ObjectAnnotation& ann,
                               const ReachPolicy& policy) {
  if (ann.bbox_w < 1 || ann.bbox_h < 1) {
    throw InvalidArgumentError("annotation \"" + ann.label + "\": empty bbox");
  }
  if (ann.bbox_x < 0 || ann.bbox_y < 0 || ann.bbox_x + ann.bbox_w > map.width ||
      ann.bbox_y + ann.bbox_h > map.height) {
    throw InvalidArgumentError("annotation \"" + ann.label + "\": bbox leaves the map");
  }
  const bool has_mask = !ann.mask.empty();
  if (has_mask && ann.mask.size() != std::size_t(ann.bbox_w) * ann.bbox_h) {
    throw InvalidArgumentError("annotation \"" + ann.label +
                               "\": mask size does not match bbox dims");
  }

  std::uint64_t total = 0, valid = 0, reachable = 0;
  for (int dy = 0; dy < ann.bbox_h; ++dy) {
    for (int dx = 0; dx < ann.bbox_w; ++dx) {
      if (has_mask && !ann.mask[std::size_t(dy) * ann.bbox_w + dx]) continue;
      ++total;
      const PixelClass c = map.at(ann.bbox_x + dx, ann.bbox_y + dy);
      if (c == PixelClass::kInvalid) continue;
      ++valid;
      if (c == PixelClass::kReachable) ++reachable;
    }
  }
  if (total == 0) {
    throw InvalidArgumentError("annotation \"" + ann.label + "\": mask selects no pixels");
  }

  ReachLabel label;
  label.valid_fraction = double(valid) / double(total);
  label.support = valid == 0 ? 0.0 : double(reachable) / double(valid);
  if (label.valid_fraction < policy.min_valid) {
    label.value = Reachability::kIndeterminate;
  } else {
    label.value = label.support >= policy.reach_threshold ? Reachability::kReachable
                                                          : Reachability::kUnreachable;
  }
  return label;
}

TemplateSet TemplateSet::all() {
  return TemplateSet{{TemplateId::kReachQuery, TemplateId::kInverseQuery,
                      TemplateId::kComparative, TemplateId::kActionGated,
                      TemplateId::kRegionQuery}};
}

void TemplateSet::validate() const {
  if (ids.empty()) throw InvalidArgumentError("template set must be non-empty");
  for (TemplateId id : ids) {
    const int v = int(id);
    if (v < 1 || v > 5) {
      throw InvalidArgumentError("unknown template id " + std::to_string(v));
    }
  }
}

std::string_view question_template(TemplateId id) {
  const int v = int(id);
  if (v < 1 || v > 5) throw InvalidArgumentError("unknown template id " + std::to_string(v));
  return kTemplates[v - 1];
}

std::vector<QAPair> generate_qa_pairs(const std::string& scene_id,
                                      const std::vector<LabeledObject>& objects,
                                      const TemplateSet& templates, std::uint64_t seed,
                                      std::vector<std::string>* warnings) {
  templates.validate();
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };

  // Output order is fixed by (object order, template id); the seed only
  // drives comparative-partner choice.
  std::vector<TemplateId> ordered_ids = templates.ids;
  std::sort(ordered_ids.begin(), ordered_ids.end());
  ordered_ids.erase(std::unique(ordered_ids.begin(), ordered_ids.end()),
                    ordered_ids.end());

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].reach == Reachability::kIndeterminate) {
      warn("object \"" + objects[i].label + "\": indeterminate reachability, skipped");
    } else {
      usable.push_back(i);
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<QAPair> pairs;
  for (std::size_t i : usable) {
    const LabeledObject& obj = objects[i];
    const bool obj_reachable = obj.reach == Reachability::kReachable;
    for (TemplateId id : ordered_ids) {
      QAPair pair;
      pair.scene_id = scene_id;
      pair.template_id = int(id);
      pair.object = obj.label;
      pair.label = std::string(to_string(obj.reach));
      pair.support = obj.support;

      if (id == TemplateId::kComparative) {
        // Pair with an opposite-label partner so the answer is well defined.
        std::vector<std::size_t> candidates;
        for (std::size_t j : usable) {
          if (j != i && (objects[j].reach == Reachability::kReachable) != obj_reachable) {
            candidates.push_back(j);
          }
        }
        if (candidates.empty()) {
          warn("object \"" + obj.label + "\": no opposite-label partner, comparative "
               "template skipped");
          continue;
        }
        const LabeledObject& partner = objects[candidates[rng() % candidates.size()]];
        pair.question = substitute(question_template(id), "[A]", obj.label);
        pair.question = substitute(pair.question, "[B]", partner.label);
        pair.answer = answer_for(id, obj_reachable,
                                 obj_reachable ? obj.label : partner.label);
      } else {
        pair.question = substitute(question_template(id), "[Object]", obj.label);
        pair.answer = answer_for(id, obj_reachable, obj.label);
      }
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

std::optional<ParsedQuestion> parse_question(std::string_view question) {
  struct Pattern {
    TemplateId id;
    std::string_view prefix;
    std::string_view suffix;
  };
  static const Pattern kPatterns[] = {
      {TemplateId::kRegionQuery, "Is the area around the ", " within reach?"},
      {TemplateId::kReachQuery, "Is the ", " in the robot's reachable space?"},
      {TemplateId::kInverseQuery, "Is the ", " outside the robot's reachable space?"},
      {TemplateId::kActionGated, "Can the robot grasp the ", " from its current position?"},
  };
  for (const auto& p : kPatterns) {
    if (question.size() > p.prefix.size() + p.suffix.size() &&
        question.starts_with(p.prefix) && question.ends_with(p.suffix)) {
      ParsedQuestion parsed;
      parsed.id = p.id;
      parsed.object = std::string(
          question.substr(p.prefix.size(),
                          question.size() - p.prefix.size() - p.suffix.size()));
      return parsed;
    }
  }
  constexpr std::string_view kCmpPrefix = "Which is reachable: ";
  if (question.starts_with(kCmpPrefix) && question.ends_with("?")) {
    const std::string_view body =
        question.substr(kCmpPrefix.size(), question.size() - kCmpPrefix.size() - 1);
    // Split on the first " or "; labels containing the separator don't
    // round-trip, which the generator doc calls out.
    const auto pos = body.find(" or ");
    if (pos != std::string_view::npos) {
      ParsedQuestion parsed;
      parsed.id = TemplateId::kComparative;
      parsed.object = std::string(body.substr(0, pos));
      parsed.partner = std::string(body.substr(pos + 4));
      return parsed;
    }
  }
  return std::nullopt;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char ch : text) {
    if (std::isalnum(ch)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(char(std::tolower(ch)));
    } else {
      pending_space = true;  // punctuation and whitespace both collapse
    }
  }
  return out;
}

ScoreReport score_responses(const std::vector<QAPair>& pairs,
                            const std::vector<std::string>& responses) {
  if (pairs.size() != responses.size()) {
    throw InvalidArgumentError("score: " + std::to_string(pairs.size()) + " pairs vs " +
                               std::to_string(responses.size()) + " responses");
  }
  ScoreReport report;
  report.correct.resize(pairs.size());
  std::uint64_t correct_count = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const QAPair& pair = pairs[i];
    std::vector<std::string> key;
    if (pair.template_id == int(TemplateId::kComparative)) {
      // Key phrase is the reachable object's label ("The X." -> "x").
      std::string normalized_answer = normalize_text(pair.answer);
      if (normalized_answer.starts_with("the ")) normalized_answer.erase(0, 4);
      key = tokens_of(normalized_answer);
    } else {
      // Yes/no polarity of the ground-truth answer.
      const auto answer_tokens = tokens_of(normalize_text(pair.answer));
      key = {answer_tokens.empty() ? std::string() : answer_tokens.front()};
    }
    const bool ok = contains_token_run(tokens_of(normalize_text(responses[i])), key);
    report.correct[i] = ok;
    if (ok) ++correct_count;
    auto& [c, t] = report.per_template[pair.template_id];
    t += 1;
    if (ok) c += 1;
  }
  report.accuracy = pairs.empty() ? 0.0 : double(correct_count) / double(pairs.size());
  return report;
}

void write_qa_jsonl(std::ostream& out, const std::vector<QAPair>& pairs) {
  for (const QAPair& p : pairs) {
    ordered_json line;
    line["scene_id"] = p.scene_id;
    line["template_id"] = p.template_id;
    line["object"] = p.object;
    line["question"] = p.question;
    line["answer"] = p.answer;
    line["label"] = p.label;
    line["support"] = p.support;
    out << line.dump() << '\n';
  }
}

std::vector<QAPair> read_qa_jsonl(std::istream& in) {
  std::vector<QAPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json obj;
    try {
      obj = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
      throw FormatError("jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
    QAPair p;
    p.scene_id = require_string(obj, "scene_id", line_no);
    p.template_id = require_int(obj, "template_id", line_no);
    p.object = require_string(obj, "object", line_no);
    p.question = require_string(obj, "question", line_no);
    p.answer = require_string(obj, "answer", line_no);
    p.label = require_string(obj, "label", line_no);
    if (obj.contains("support") && obj.at("support").is_number()) {
      p.support = obj.at("support").get<double>();
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void write_responses_jsonl(std::ostream& out, const std::vector<ResponseRecord>& records) {
  for (const ResponseRecord& r : records) {
    ordered_json line;
    line["scene_id"] = r.scene_id;
    line["template_id"] = r.template_id;
    line["object"] = r.object;
    line["response"] = r.response;
    out << line.dump() << '\n';
  }
}

std::vector<ResponseRecord> read_responses_jsonl(std::istream& in) {
  std::vector<ResponseRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json obj;
    try {
      obj = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
      throw FormatError("jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
    ResponseRecord r;
    r.scene_id = require_string(obj, "scene_id", line_no);
    r.template_id = require_int(obj, "template_id", line_no);
    r.object = require_string(obj, "object", line_no);
    r.response = require_string(obj, "response", line_no);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace spreach
