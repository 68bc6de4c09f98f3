#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "iecsi/model.hpp"

namespace iecsi {

enum class Segment { Exploration, Contentment };
enum class ScoringTransform { Raw, Centered };

// Likert items are scored; Count items are logged interaction counts
// (docs viewed); Summary items are the free-text knowledge-gain tasks.
enum class ResponseKind { Likert, Count, Summary };

std::string_view to_string(Segment s);
std::string_view to_string(ScoringTransform t);
std::string_view to_string(ResponseKind k);

struct Item {
  std::string item_id;
  std::string prompt;
  std::string negative_anchor;
  std::string positive_anchor;
  Phase phase = Phase::Post;
  bool reverse_coded = false;
  ResponseKind kind = ResponseKind::Likert;
  bool operator==(const Item&) const = default;
};

struct Instrument {
  std::string instrument_id;
  std::string name;
  Segment segment = Segment::Exploration;
  std::vector<Item> items;
  // Ordered subscale_id -> member item ids.
  std::vector<std::pair<std::string, std::vector<std::string>>> subscales;
  ScoringTransform scoring_transform = ScoringTransform::Raw;
  // False when a high score is unfavourable (workload). Qualitative
  // annotation reflects such means about the scale midpoint.
  bool higher_is_better = true;
  // Report section this instrument's annotations are tallied under.
  std::string section;

  const Item* find_item(std::string_view item_id) const;
  bool operator==(const Instrument&) const = default;
};

using InstrumentRegistry = std::map<std::string, Instrument, std::less<>>;

namespace instrument_ids {
inline constexpr std::string_view kPssuq = "PSSUQ";
inline constexpr std::string_view kUeqS = "UEQ-S";
inline constexpr std::string_view kNasaTlx = "NASA-TLX";
inline constexpr std::string_view kSal = "SAL";
inline constexpr std::string_view kKnowledgeGain = "KG";
}  // namespace instrument_ids

// Returns the five built-in instruments.
InstrumentRegistry builtin_registry();

// Structural problems of a single instrument; empty when valid.
std::vector<std::string> check_instrument(const Instrument& instrument);

// Parses an override document and returns `base` with its instruments
// replaced (by id) or added. Throws ParseError naming the offending field.
InstrumentRegistry load_overrides(const std::filesystem::path& path,
                                  InstrumentRegistry base = builtin_registry());
InstrumentRegistry apply_overrides(std::string_view json_text, InstrumentRegistry base,
                                   const std::string& source = "overrides");

// Serializes an instrument with the same schema load_overrides accepts.
std::string instrument_to_json(const Instrument& instrument);

// Canonical report order: Exploration (PSSUQ, UEQ-S, NASA-TLX), then
// Contentment (SAL, KG), then any others by id.
std::vector<std::string> ordered_instrument_ids(const std::vector<std::string>& ids);

}  // namespace iecsi
