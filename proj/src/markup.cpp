#include "citepred/markup.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "citepred/text.hpp"

namespace citepred {

namespace {

// Ranges wider than this are treated as a typo rather than expanded.
constexpr int kMaxRangeSpan = 200;

const std::regex& numeric_marker_re() {
  static const std::regex re(
      R"(\[[ \t]*\d{1,4}(?:[ \t]*(?:-|–|—)[ \t]*\d{1,4})?)"
      R"((?:[ \t]*[,;][ \t]*\d{1,4}(?:[ \t]*(?:-|–|—)[ \t]*\d{1,4})?)*[ \t]*\])");
  return re;
}

const std::regex& author_year_re() {
  // NAME is an uppercase initial followed by anything but separators.
  static const std::string name = R"([A-Z][^ \t\n,;()\d]*)";
  static const std::string cite = name +
                                  R"((?:[ \t]+et[ \t]+al\.?|[ \t]+(?:and|&)[ \t]+)" + name +
                                  R"()?,?[ \t]+\d{4}[a-z]?)";
  static const std::regex re(R"(\([ \t]*)" + cite + R"((?:[ \t]*;[ \t]*)" + cite +
                             R"()*[ \t]*\))");
  return re;
}

std::vector<int> expand_numbers(const std::string& marker) {
  static const std::regex part(R"((\d+)(?:[ \t]*(?:-|–|—)[ \t]*(\d+))?)");
  std::vector<int> out;
  for (auto it = std::sregex_iterator(marker.begin(), marker.end(), part);
       it != std::sregex_iterator(); ++it) {
    const int lo = std::stoi((*it)[1].str());
    int hi = lo;
    if ((*it)[2].matched) hi = std::stoi((*it)[2].str());
    if (hi < lo || hi - lo > kMaxRangeSpan) hi = lo;
    for (int n = lo; n <= hi; ++n) out.push_back(n);
  }
  return out;
}

const std::vector<std::string>& known_headings() {
  static const std::vector<std::string> names = {
      "abstract",
      "introduction",
      "related work",
      "related works",
      "background",
      "preliminaries",
      "method",
      "methods",
      "methodology",
      "approach",
      "experiments",
      "experimental setup",
      "experimental results",
      "results",
      "evaluation",
      "discussion",
      "conclusion",
      "conclusions",
      "conclusion and future work",
      "conclusions and future work",
      "limitations",
      "acknowledgments",
      "acknowledgements",
      "references",
      "bibliography",
      "appendix",
  };
  return names;
}

std::string lowercase_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t word_count(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

bool is_heading_line(const std::string& line) {
  if (line.empty() || line.size() > 120) return false;
  static const std::regex markdown(R"(^#{1,6}[ \t]+\S.*$)");
  static const std::regex numbered(R"(^\d{1,2}(?:\.\d{1,2})*\.?[ \t]+[A-Z][^.:!?]*$)");
  static const std::regex roman(R"(^[IVX]{1,5}\.[ \t]+[A-Z][^.:!?]*$)");
  if (std::regex_match(line, markdown)) return true;
  if ((std::regex_match(line, numbered) || std::regex_match(line, roman)) &&
      word_count(line) <= 10) {
    return true;
  }
  const std::string key = heading_key(line);
  const auto& names = known_headings();
  if (std::find(names.begin(), names.end(), key) != names.end()) return true;
  return key.rfind("appendix", 0) == 0 && word_count(line) <= 8;
}

}  // namespace

std::vector<CitationMarker> find_citation_markers(std::string_view text) {
  const std::string s(text);
  std::vector<CitationMarker> markers;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), numeric_marker_re());
       it != std::sregex_iterator(); ++it) {
    CitationMarker m;
    m.begin = static_cast<std::size_t>(it->position());
    m.end = m.begin + static_cast<std::size_t>(it->length());
    m.numbers = expand_numbers(it->str());
    markers.push_back(std::move(m));
  }
  for (auto it = std::sregex_iterator(s.begin(), s.end(), author_year_re());
       it != std::sregex_iterator(); ++it) {
    CitationMarker m;
    m.begin = static_cast<std::size_t>(it->position());
    m.end = m.begin + static_cast<std::size_t>(it->length());
    m.author_year = true;
    markers.push_back(std::move(m));
  }
  std::sort(markers.begin(), markers.end(),
            [](const CitationMarker& a, const CitationMarker& b) { return a.begin < b.begin; });
  // The two grammars are disjoint in practice; drop any overlap defensively.
  std::vector<CitationMarker> out;
  for (auto& m : markers) {
    if (!out.empty() && m.begin < out.back().end) continue;
    out.push_back(std::move(m));
  }
  return out;
}

std::string strip_citation_markers(std::string_view text) {
  std::string current(text);
  while (true) {
    const auto markers = find_citation_markers(current);
    if (markers.empty()) return current;
    std::string next;
    next.reserve(current.size());
    std::size_t pos = 0;
    for (const auto& m : markers) {
      std::size_t cut = m.begin;
      while (cut > pos && (current[cut - 1] == ' ' || current[cut - 1] == '\t')) --cut;
      next.append(current, pos, cut - pos);
      pos = m.end;
    }
    next.append(current, pos, std::string::npos);
    current = std::move(next);
  }
}

std::string heading_key(std::string_view heading) {
  static const std::regex prefix(R"(^(?:#{1,6}[ \t]+)?(?:(?:\d{1,2}(?:\.\d{1,2})*|[IVX]{1,5})\.?[ \t]+)?)");
  const std::string trimmed = trim(heading);
  const std::string rest = std::regex_replace(trimmed, prefix, "", std::regex_constants::format_first_only);
  std::string key = lowercase_ascii(trim(rest));
  while (!key.empty() && (key.back() == ':' || key.back() == '.')) key.pop_back();
  return key;
}

bool is_introduction_heading(std::string_view heading) {
  return heading_key(heading) == "introduction";
}

bool is_references_heading(std::string_view heading) {
  const std::string key = heading_key(heading);
  return key == "references" || key == "reference" || key == "bibliography";
}

bool is_abstract_heading(std::string_view heading) { return heading_key(heading) == "abstract"; }

std::vector<SectionText> split_sections(std::string_view body) {
  std::vector<SectionText> sections;
  SectionText current;
  bool has_content = false;
  auto flush = [&] {
    current.text = trim(current.text);
    if (has_content || !current.heading.empty()) sections.push_back(std::move(current));
    current = SectionText{};
    has_content = false;
  };

  std::size_t pos = 0;
  while (pos <= body.size()) {
    const std::size_t nl = body.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? body.size() : nl;
    const std::string line = trim(body.substr(pos, end - pos));
    if (is_heading_line(line)) {
      flush();
      std::string heading = line;
      if (!heading.empty() && heading.front() == '#') {
        heading = trim(std::string_view(heading).substr(heading.find_first_not_of('#')));
      }
      current.heading = std::move(heading);
    } else {
      if (!current.text.empty()) current.text.push_back('\n');
      current.text += body.substr(pos, end - pos);
      if (!line.empty()) has_content = true;
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  flush();
  return sections;
}

}  // namespace citepred
