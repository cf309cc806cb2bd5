#pragma once

// Citation-marker grammar and section splitting for pre-extracted paper text.
//
// Recognized markers:
//   numeric brackets   [12]   [3-5]   [3–5]   [1, 4, 7-9]
//   author-year        (Smith, 2020)   (Smith et al., 2020)
//                      (Smith and Jones, 2019; Lee et al., 2021a)
// Markers never span a line break.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace citepred {

struct CitationMarker {
  std::size_t begin = 0;  ///< byte offset of the marker
  std::size_t end = 0;    ///< one past the last byte
  bool author_year = false;
  /// 1-based reference-list positions for numeric markers, in marker order
  /// with ranges expanded. Empty for author-year markers.
  std::vector<int> numbers;
};

std::vector<CitationMarker> find_citation_markers(std::string_view text);

/// Removes every marker together with the horizontal whitespace in front of
/// it. Repeats until no marker remains.
std::string strip_citation_markers(std::string_view text);

struct SectionText {
  std::string heading;  ///< empty for text before the first heading
  std::string text;

  bool operator==(const SectionText&) const = default;
};

/// Splits full text into sections at heading lines (numbered, markdown `#`,
/// roman-numbered, or a bare well-known section name).
std::vector<SectionText> split_sections(std::string_view body);

/// Heading text with numbering and markdown prefix removed, lowercased.
std::string heading_key(std::string_view heading);

bool is_introduction_heading(std::string_view heading);
bool is_references_heading(std::string_view heading);
bool is_abstract_heading(std::string_view heading);

}  // namespace citepred
