#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "medcheck/errors.hpp"

namespace medcheck {

// One line of a clinical narrative. Text is trimmed, non-empty and holds no
// line breaks; ids within a note are unique and strictly increasing.
struct Sentence {
  int id = 0;
  std::string text;

  bool operator==(const Sentence&) const = default;
};

struct ClinicalNote {
  std::string note_id;
  std::vector<Sentence> sentences;

  const Sentence* find_sentence(int id) const;

  bool operator==(const ClinicalNote&) const = default;
};

// Label for one note: either error-free, or exactly one erroneous sentence
// with its correction.
struct GroundTruth {
  bool has_error = false;
  std::optional<int> error_sentence_id;
  std::optional<std::string> corrected_sentence;

  bool operator==(const GroundTruth&) const = default;
};

// Throws InvariantViolation if the pair breaks the ground-truth contract
// (flag set without id+correction, id not present in the note, or stray
// fields on an error-free note).
void validate_ground_truth(const ClinicalNote& note, const GroundTruth& gt);

struct Dataset {
  std::string name;  // split label, e.g. "ms-train", "uw-test"
  std::vector<std::pair<ClinicalNote, GroundTruth>> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

enum class SeparatorPolicy { pipe, whitespace, auto_detect };

// Parses "id<sep>sentence" lines into a note. Blank lines are skipped.
// Throws MalformedLine, DuplicateSentenceId or NonMonotonicIds.
ClinicalNote parse_note(const std::string& note_id, const std::string& raw_text,
                        SeparatorPolicy policy = SeparatorPolicy::auto_detect);

// Canonical pipe form, "id|sentence" one line per sentence in id order.
// parse_note(render_note(n)) == n for every valid note.
std::string render_note(const ClinicalNote& note);

enum class FileFormat { auto_detect, jsonl, delimited };

// Field names for the five record columns plus ingestion knobs. The defaults
// match the bundled JSONL layout; override them to absorb whatever column
// names a delimiter-separated export uses.
struct ColumnMapping {
  std::string note_id = "note_id";
  std::string text = "text";
  std::string has_error = "has_error";
  std::string error_sentence_id = "error_sentence_id";
  std::string corrected_sentence = "corrected_sentence";
  SeparatorPolicy separator_policy = SeparatorPolicy::auto_detect;
  FileFormat format = FileFormat::auto_detect;  // by extension: .jsonl/.ndjson vs anything else
  char delimiter = ',';
  // Cell values that mean "absent" for the two optional columns.
  std::vector<std::string> absent_markers = {"", "-1", "NA"};
};

// Loads one split. Every row becomes a (note, ground truth) pair with all
// invariants enforced; row order is preserved. split_name defaults to the
// file stem. Throws IoError, SchemaError, InvariantViolation.
Dataset load_split(const std::filesystem::path& path,
                   const ColumnMapping& mapping = {},
                   const std::string& split_name = "");

struct SplitSummary {
  std::size_t n_total = 0;
  std::size_t n_correct = 0;
  std::size_t n_error = 0;

  bool operator==(const SplitSummary&) const = default;
};

SplitSummary split_summary(const Dataset& ds);

}  // namespace medcheck
