#include "citepred/synthetic.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace citepred {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprtvz";
constexpr std::string_view kVowels = "aeiou";

/// Pronounceable three-syllable word, unique per index below 65^3.
std::string word(std::size_t index) {
  // Multiplying by a unit modulo 65^3 scatters consecutive indices.
  index = (index * 7919 + 4099) % 274625;
  std::string w;
  for (int s = 0; s < 3; ++s) {
    const std::size_t syllable = index % (kConsonants.size() * kVowels.size());
    index /= kConsonants.size() * kVowels.size();
    w.push_back(kConsonants[syllable / kVowels.size()]);
    w.push_back(kVowels[syllable % kVowels.size()]);
  }
  return w;
}

class TextMaker {
 public:
  TextMaker(std::size_t vocabulary, std::mt19937_64& rng) : vocabulary_(vocabulary), rng_(rng) {}

  std::string background_word() {
    // Squared uniform gives a skewed, Zipf-like frequency profile.
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    return word(static_cast<std::size_t>(u * u * static_cast<double>(vocabulary_)));
  }

  /// `length` background words with `planted` spliced in at random positions
  /// and a full stop every dozen words.
  std::string passage(std::size_t length, const std::vector<std::string>& planted) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < length; ++i) words.push_back(background_word());
    for (const auto& p : planted) {
      std::uniform_int_distribution<std::size_t> at(0, words.size());
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at(rng_)), p);
    }
    std::ostringstream out;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) out << ((i % 12 == 0) ? ". " : " ");
      out << words[i];
    }
    out << '.';
    return out.str();
  }

  std::vector<std::string> pick(const std::vector<std::string>& from, std::size_t n) {
    std::vector<std::string> out = from;
    std::shuffle(out.begin(), out.end(), rng_);
    out.resize(std::min(n, out.size()));
    return out;
  }

 private:
  std::size_t vocabulary_;
  std::mt19937_64& rng_;
};

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

}  // namespace

PlantedCorpus make_planted_corpus(const PlantedOptions& options) {
  std::mt19937_64 rng(options.seed);
  TextMaker text(options.vocabulary, rng);
  const auto& categories = default_categories();
  std::uniform_int_distribution<std::size_t> any_category(0, categories.size() - 1);
  std::uniform_int_distribution<int> any_year(2015, 2024);

  // Word indices past the background vocabulary are private to one query or
  // one paper title.
  std::size_t next_private = options.vocabulary;
  std::vector<std::vector<std::string>> signatures(options.queries);
  for (auto& sig : signatures) {
    for (std::size_t j = 0; j < options.signature_words; ++j) sig.push_back(word(next_private++));
  }

  PlantedCorpus out;
  std::vector<std::size_t> owner(options.docs, options.queries);  // query citing each doc
  std::vector<std::size_t> order(options.docs);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;
  std::vector<std::vector<std::size_t>> cited(options.queries);
  for (std::size_t q = 0; q < options.queries; ++q) {
    for (std::size_t r = 0; r < options.refs_per_query && cursor < order.size(); ++r) {
      owner[order[cursor]] = q;
      cited[q].push_back(order[cursor++]);
    }
  }

  auto doc_id = [](std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "doc%04zu", i);
    return std::string(buf);
  };

  std::bernoulli_distribution confuse(options.confuser_rate);
  std::uniform_int_distribution<std::size_t> any_query(0, options.queries ? options.queries - 1 : 0);
  for (std::size_t i = 0; i < options.docs; ++i) {
    RawPaper p;
    p.id = doc_id(i);
    p.domain_category = categories[any_category(rng)];
    p.year = any_year(rng);
    p.venue = "Synthetic Proceedings";
    p.authors = {capitalize(text.background_word()) + " " + capitalize(text.background_word())};
    const std::string unique = word(next_private++);
    p.title = capitalize(text.background_word()) + " " + unique + " " + text.background_word() +
              " " + text.background_word();

    std::vector<std::string> in_abstract, in_intro, in_body;
    if (owner[i] < options.queries) {
      const auto& sig = signatures[owner[i]];
      in_abstract = text.pick(sig, 2);
      in_intro = text.pick(sig, 3);
      in_body = text.pick(sig, 3);
    } else if (options.queries > 0 && confuse(rng)) {
      // Borrowed words land in one random part of the paper.
      auto borrowed = text.pick(signatures[any_query(rng)], 2);
      switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0: in_abstract = std::move(borrowed); break;
        case 1: in_intro = std::move(borrowed); break;
        default: in_body = std::move(borrowed); break;
      }
    }
    p.abstract = text.passage(40, in_abstract);
    p.sections = {{"1 Introduction", text.passage(80, in_intro)},
                  {"2 Method", text.passage(120, in_body)},
                  {"3 Conclusion", text.passage(30, {})}};
    out.papers.push_back(std::move(p));
  }

  for (std::size_t q = 0; q < options.queries; ++q) {
    RawPaper p;
    char buf[32];
    std::snprintf(buf, sizeof buf, "query%03zu", q);
    p.id = buf;
    p.domain_category = categories[any_category(rng)];
    p.year = 2025;
    p.venue = "Synthetic Proceedings";
    p.authors = {capitalize(text.background_word()) + " " + capitalize(text.background_word())};
    const auto& sig = signatures[q];
    p.title = capitalize(word(next_private++)) + " " + sig[0] + " " + sig[1] + " " +
              text.background_word();
    p.abstract = text.passage(40, sig);

    for (std::size_t r : cited[q]) {
      p.references.push_back({out.papers[r].title, out.papers[r].id});
    }
    const std::size_t n = cited[q].size();
    auto marker = [](std::size_t ref) { return " [" + std::to_string(ref) + "]"; };
    std::string intro, related, method;
    for (std::size_t r = 1; r <= n; ++r) intro += text.passage(10, {}) + marker(r) + " ";
    for (std::size_t r = n; r >= 1; --r) {
      related += text.passage(8, {}) + marker(r) + " ";
      if (r % 2 == 1) related += text.passage(6, {}) + marker(r) + " ";
    }
    if (n >= 2) method = text.passage(12, {}) + " [1, 2]. " + text.passage(12, {}) + marker(1);
    p.sections = {{"1 Introduction", intro},
                  {"2 Related Work", related},
                  {"3 Method", method + " " + text.passage(30, {})},
                  {"4 Conclusion", text.passage(25, {})}};
    out.query_ids.push_back(p.id);
    for (std::size_t r : cited[q]) out.cited_ids[p.id].push_back(out.papers[r].id);
    out.papers.push_back(std::move(p));
  }
  return out;
}

Corpus ingest_all(const std::vector<RawPaper>& papers) {
  std::vector<PaperRecord> records;
  records.reserve(papers.size());
  for (const auto& p : papers) records.push_back(ingest_paper(p));
  return Corpus(std::move(records));
}

}  // namespace citepred
