#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spreach/spmap.hpp"

namespace spreach {

// 2D object annotation in image coordinates. When `mask` is present it has
// bbox_w * bbox_h row-major 0/1 entries selecting pixels inside the bbox;
// otherwise the full bbox interior is the object's pixel set.
struct ObjectAnnotation {
  std::string label;
  int bbox_x = 0;
  int bbox_y = 0;
  int bbox_w = 0;
  int bbox_h = 0;
  std::vector<std::uint8_t> mask;
};

struct ReachPolicy {
  double min_valid = 0.2;        // below this valid-depth fraction -> indeterminate
  double reach_threshold = 0.5;  // reachable iff support >= this
};

enum class Reachability : std::uint8_t { kUnreachable, kReachable, kIndeterminate };

std::string_view to_string(Reachability r);

struct ReachLabel {
  Reachability value = Reachability::kIndeterminate;
  double support = 0.0;         // fraction of valid object pixels classified reachable
  double valid_fraction = 0.0;  // fraction of object pixels with valid depth
};

// Pseudo-labels one object from the S-P Map: gather the object's pixel set,
// compute valid_fraction and (over valid pixels) support, then threshold.
// Throws InvalidArgumentError if the annotation leaves the map bounds or the
// mask is malformed.
ReachLabel object_reachability(const SPMap& map, const ObjectAnnotation& ann,
                               const ReachPolicy& policy = {});

// The five question templates. Question and answer strings are fixed verbatim;
// see question_template() and the README table.
enum class TemplateId : int {
  kReachQuery = 1,     // "Is the [Object] in the robot's reachable space?"
  kInverseQuery = 2,   // "Is the [Object] outside the robot's reachable space?"
  kComparative = 3,    // "Which is reachable: [A] or [B]?"
  kActionGated = 4,    // "Can the robot grasp the [Object] from its current position?"
  kRegionQuery = 5,    // "Is the area around the [Object] within reach?"
};

struct TemplateSet {
  std::vector<TemplateId> ids;

  static TemplateSet all();
  void validate() const;  // non-empty, known ids
};

// Template text with "[Object]" (and "[B]" for the comparative template)
// placeholders left in place.
std::string_view question_template(TemplateId id);

struct LabeledObject {
  std::string label;
  Reachability reach = Reachability::kIndeterminate;
  double support = 0.0;
};

struct QAPair {
  std::string scene_id;
  int template_id = 0;
  std::string object;
  std::string question;
  std::string answer;
  std::string label;  // "reachable" | "unreachable"
  double support = 0.0;
};

// Generates one pair per (object, template). Indeterminate objects are
// skipped with a warning. Output order is fixed by (object order, template
// id); the seed only drives partner choice for the comparative template,
// which pairs each object with an opposite-label partner and is skipped when
// none exists.
std::vector<QAPair> generate_qa_pairs(const std::string& scene_id,
                                      const std::vector<LabeledObject>& objects,
                                      const TemplateSet& templates, std::uint64_t seed,
                                      std::vector<std::string>* warnings = nullptr);

struct ParsedQuestion {
  TemplateId id;
  std::string object;
  std::string partner;  // comparative template only
};

// Inverse of the template substitution; recovers (template id, object label)
// from a generated question. Returns nullopt for unrecognized text.
std::optional<ParsedQuestion> parse_question(std::string_view question);

// Lowercases, strips punctuation, collapses whitespace.
std::string normalize_text(std::string_view text);

struct ScoreReport {
  std::vector<bool> correct;
  double accuracy = 0.0;
  // template id -> (correct, total)
  std::map<int, std::pair<std::uint64_t, std::uint64_t>> per_template;
};

// Deterministic string matching: a response is correct iff its normalized
// form contains the normalized key of the ground-truth answer — the yes/no
// polarity token for yes/no templates, the reachable object's label for the
// comparative one. Requires equal lengths.
ScoreReport score_responses(const std::vector<QAPair>& pairs,
                            const std::vector<std::string>& responses);

// JSON-lines serialization, one object per line, byte-deterministic:
// {scene_id, template_id, object, question, answer, label, support}.
void write_qa_jsonl(std::ostream& out, const std::vector<QAPair>& pairs);
std::vector<QAPair> read_qa_jsonl(std::istream& in);

struct ResponseRecord {
  std::string scene_id;
  int template_id = 0;
  std::string object;
  std::string response;
};

// JSON-lines: {scene_id, template_id, object, response}.
void write_responses_jsonl(std::ostream& out, const std::vector<ResponseRecord>& records);
std::vector<ResponseRecord> read_responses_jsonl(std::istream& in);

}  // namespace spreach
