#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gen {

namespace {

const std::vector<std::string>& lexicon() {
  static const std::vector<std::string> words = {
      "graph",    "neural",   "citation", "retrieval", "sparse",  "dense",   "learning",
      "model",    "language", "network",  "attention", "vision",  "robust",  "search",
      "ranking",  "fusion",   "corpus",   "embedding", "bayesian", "kernel", "optimal",
      "transport", "quantum", "protein",  "federated", "causal",  "temporal", "spectral"};
  return words;
}

std::string fullwidth(char c) {
  // U+FF41.. for a-z, U+FF10.. for 0-9; both fold back under NFKC.
  const unsigned base = (c >= 'a' && c <= 'z') ? 0xFF41u + static_cast<unsigned>(c - 'a')
                                               : 0xFF10u + static_cast<unsigned>(c - '0');
  std::string out;
  out.push_back(static_cast<char>(0xE0 | (base >> 12)));
  out.push_back(static_cast<char>(0x80 | ((base >> 6) & 0x3F)));
  out.push_back(static_cast<char>(0x80 | (base & 0x3F)));
  return out;
}

std::string words(Rng& rng, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += rng.pick(lexicon());
  }
  return out;
}

}  // namespace

std::string random_key(Rng& rng, std::size_t vocabulary) {
  const std::size_t n = rng.between(1, 3);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += lexicon()[rng.between(0, std::min(vocabulary, lexicon().size()) - 1)];
  }
  if (rng.chance(0.2)) out += " " + std::to_string(rng.between(1, 9));
  return out;
}

std::string surface_variant(const std::string& key, Rng& rng) {
  static const std::vector<std::string> separators = {" ", "  ", " - ", ": ", ", ", "\t", "/"};
  std::string out;
  if (rng.chance(0.3)) out += "  ";
  for (char c : key) {
    if (c == ' ') {
      out += rng.pick(separators);
    } else if (rng.chance(0.05)) {
      out += fullwidth(c);
    } else if (c >= 'a' && c <= 'z' && rng.chance(0.3)) {
      out.push_back(static_cast<char>(c - 'a' + 'A'));
    } else {
      out.push_back(c);
    }
  }
  if (rng.chance(0.3)) out += rng.chance(0.5) ? "!" : ".";
  if (rng.chance(0.2)) out += " ";
  return out;
}

MetricFixture random_metric_fixture(Rng& rng) {
  MetricFixture f;
  const std::size_t vocabulary = rng.between(4, 28);
  std::set<std::string> gt;
  const std::size_t gt_target = rng.between(1, 10);
  for (int attempt = 0; attempt < 200 && gt.size() < gt_target; ++attempt) {
    gt.insert(random_key(rng, vocabulary));
  }
  f.gt_keys.assign(gt.begin(), gt.end());
  std::shuffle(f.gt_keys.begin(), f.gt_keys.end(), rng.engine());
  for (const auto& k : f.gt_keys) f.gt_surface.push_back(surface_variant(k, rng));

  const std::size_t n_pred = rng.between(0, 40);
  for (std::size_t i = 0; i < n_pred; ++i) {
    const std::string key = rng.chance(0.35) ? rng.pick(f.gt_keys) : random_key(rng, vocabulary);
    f.pred_keys.push_back(key);
    f.pred_surface.push_back(surface_variant(key, rng));
  }

  const std::size_t n_placeholders = rng.between(1, 20);
  for (std::size_t p = 0; p < n_placeholders; ++p) {
    const std::string truth = random_key(rng, vocabulary);
    f.placeholder_keys.push_back(truth);
    f.placeholder_surface.push_back(surface_variant(truth, rng));
    std::vector<std::string> keys, surface;
    const std::size_t n = rng.between(0, 40);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string key = rng.chance(0.1) ? truth : random_key(rng, vocabulary);
      keys.push_back(key);
      surface.push_back(surface_variant(key, rng));
    }
    f.cand_keys.push_back(std::move(keys));
    f.cand_surface.push_back(std::move(surface));
  }
  return f;
}

std::vector<std::pair<std::string, std::string>> random_documents(Rng& rng, std::size_t count,
                                                                  std::size_t vocabulary,
                                                                  std::size_t max_words) {
  std::vector<std::pair<std::string, std::string>> docs;
  for (std::size_t d = 0; d < count; ++d) {
    std::ostringstream text;
    const std::size_t n = rng.between(1, max_words);
    for (std::size_t i = 0; i < n; ++i) {
      // Skewed term choice gives a spread of document frequencies.
      const double u = rng.unit();
      text << (i ? " " : "") << "w" << static_cast<std::size_t>(u * u * static_cast<double>(vocabulary));
    }
    docs.emplace_back("d" + std::to_string(1000 + d), text.str());
  }
  return docs;
}

std::vector<Eigen::VectorXf> random_unit_vectors(Rng& rng, std::size_t count, std::size_t dim) {
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::vector<Eigen::VectorXf> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::VectorXf v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = normal(rng.engine());
    out.push_back(v / v.norm());
  }
  return out;
}

std::vector<citepred::RawPaper> random_task2_papers(Rng& rng, std::size_t citing,
                                                    std::size_t background) {
  static const std::vector<std::string> headings = {
      "1 Introduction", "2 Related Work", "3 Method", "4 Experiments", "5 Discussion"};
  std::vector<citepred::RawPaper> papers;
  std::vector<std::string> background_titles;
  for (std::size_t b = 0; b < background; ++b) {
    citepred::RawPaper p;
    p.id = "bg" + std::to_string(b);
    p.title = "Background study " + std::to_string(b) + " " + words(rng, 2);
    p.abstract = words(rng, 20);
    p.domain_category = "cs.IR";
    p.sections = {{"1 Introduction", words(rng, 30)}};
    background_titles.push_back(p.title);
    papers.push_back(std::move(p));
  }

  for (std::size_t c = 0; c < citing; ++c) {
    citepred::RawPaper p;
    p.id = "paper" + std::to_string(c);
    p.title = "Citing paper " + std::to_string(c) + " " + words(rng, 3);
    p.abstract = words(rng, 25);
    p.domain_category = "cs.CL";
    const std::size_t n_refs = rng.between(1, 8);
    for (std::size_t r = 0; r < n_refs; ++r) {
      citepred::RawPaper::Reference ref;
      const double kind = rng.unit();
      if (kind < 0.4) {
        ref.title = "External work " + std::to_string(c) + "-" + std::to_string(r);
        ref.id = "ext:" + std::to_string(c) + "-" + std::to_string(r);
      } else if (kind < 0.8 && !background_titles.empty()) {
        ref.title = rng.pick(background_titles);
      } else {
        ref.title = "Unresolvable note " + std::to_string(c) + "-" + std::to_string(r);
      }
      p.references.push_back(std::move(ref));
    }
    // Occasional duplicated reference title.
    if (n_refs > 1 && rng.chance(0.05)) p.references.back().title = p.references.front().title;

    const std::size_t n_sections = rng.between(1, 5);
    const bool over_cite = rng.chance(0.1);
    const bool out_of_range = rng.chance(0.05);
    for (std::size_t s = 0; s < n_sections; ++s) {
      std::string text;
      const std::size_t markers = over_cite && s == 0 ? 11 : rng.between(0, 9);
      for (std::size_t m = 0; m < markers; ++m) {
        text += words(rng, rng.between(3, 10)) + " ";
        if (over_cite && s == 0) {
          text += "[1]";
        } else {
          const std::size_t a = rng.between(1, n_refs);
          const double form = rng.unit();
          if (form < 0.6) {
            text += "[" + std::to_string(a) + "]";
          } else if (form < 0.8) {
            const std::size_t b = rng.between(a, n_refs);
            text += "[" + std::to_string(a) + "-" + std::to_string(b) + "]";
          } else {
            text += "[" + std::to_string(a) + ", " + std::to_string(rng.between(1, n_refs)) + "]";
          }
        }
        text += rng.chance(0.3) ? ".\n" : " ";
      }
      if (out_of_range && s == n_sections - 1) text += " see [" + std::to_string(n_refs + 2) + "].";
      text += words(rng, 5) + ".";
      p.sections.push_back({headings[s], text});
    }
    papers.push_back(std::move(p));
  }
  return papers;
}

std::vector<ResponseCase> well_formed_responses(Rng& rng, std::size_t count) {
  using nlohmann::json;
  std::vector<ResponseCase> out;
  for (std::size_t i = 0; i < count; ++i) {
    ResponseCase c;
    c.task = rng.chance(0.5) ? 1 : 2;
    json doc;
    if (c.task == 1) {
      json titles = json::array();
      std::set<std::string> seen;
      const std::size_t n = rng.between(0, 25);
      for (std::size_t t = 0; t < n; ++t) {
        const std::string key = random_key(rng, 28);
        const std::string surface = surface_variant(key, rng);
        titles.push_back(surface);
        if (seen.insert(key).second) c.titles.push_back(surface);
      }
      doc["titles"] = titles;
    } else {
      json predictions = json::array();
      std::set<std::pair<std::size_t, std::size_t>> slots;
      const std::size_t n = rng.between(0, 12);
      for (std::size_t t = 0; t < n; ++t) {
        const std::size_t section = rng.between(1, 3), placeholder = rng.between(1, 4);
        slots.insert({section, placeholder});
        json titles = json::array();
        for (std::size_t j = rng.between(0, 5); j > 0; --j) titles.push_back(random_key(rng, 28));
        json entry = {{"placeholder", rng.chance(0.5) ? json("[ref]_" + std::to_string(placeholder))
                                                      : json(placeholder)},
                      {"titles", titles}};
        entry["section"] = section;
        predictions.push_back(entry);
      }
      c.placeholders = slots.size();
      doc["predictions"] = predictions;
    }
    if (rng.chance(0.7)) doc["reasoning"] = words(rng, rng.between(0, 12));

    const std::string body = doc.dump(rng.chance(0.5) ? 2 : -1);
    switch (rng.between(0, 3)) {
      case 0: c.raw = body; break;
      case 1: c.raw = "\n  " + body + "\n\n"; break;
      case 2: c.raw = "Here is the answer:\n```json\n" + body + "\n```\nHope this helps."; break;
      default: c.raw = "```\n" + body + "\n```"; break;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::string> malformed_responses(Rng& rng, std::size_t count) {
  static const std::vector<std::string> fixed = {
      "",
      "   ",
      "I could not find any relevant papers.",
      "null",
      "42",
      "\"titles\"",
      "[]",
      "[{\"titles\": [\"a\"]}]",
      "{}",
      "{\"reasoning\": \"none\"}",
      "{\"titles\": \"one title\", \"predictions\": 5}",
      "{\"titles\": null, \"predictions\": null}",
      "{\"titles\": [1, 2, 3], \"predictions\": [1, 2]}",
      "{\"titles\": [[\"nested\"]], \"predictions\": [{\"placeholder\": 0, \"titles\": []}]}",
      "{\"titles\": {\"a\": 1}, \"predictions\": [{\"placeholder\": \"[ref]_x\", \"titles\": []}]}",
      "{\"titles\": false, \"predictions\": [{\"section\": -1, \"placeholder\": 1, \"titles\": []}]}",
      "{\"titles\": 3.5, \"predictions\": [{\"placeholder\": 1}]}",
      "{\"titles\": [null], \"predictions\": [{\"titles\": [\"a\"]}]}",
      "{\"titles\": [\"a\"",
      "```json\n{\"titles\": [\"a\"]\n",
      "```json\n{\"titles\": [\"a\"]}",
      "```\nnot json at all\n```",
      "```json\n[1, 2]\n```",
      "{'titles': ['single quotes']}",
      "{\"titles\": [\"a\"]} trailing {",
      "\xff\xfe{\"titles\": [\"a\"]}",
      "{\"titles\": [\"\xc3\x28\"]}",
      std::string("{\"titles\": [\"a\0b\"]}", 19),
  };
  std::vector<std::string> out(fixed.begin(), fixed.end());

  nlohmann::json valid1 = {{"titles", {"Graph neural networks", "Dense retrieval"}},
                           {"reasoning", "x"}};
  nlohmann::json valid2 = {
      {"predictions", {{{"section", 1}, {"placeholder", "[ref]_1"}, {"titles", {"a", "b"}}}}}};
  const std::vector<std::string> valid = {valid1.dump(), valid2.dump(), valid1.dump(2)};
  static const std::string alphabet =
      "{}[]\":,`abcdefghijklmnopqrstuvwxyz0123456789 \n\t\\-.#*ref_";

  while (out.size() < count) {
    switch (rng.between(0, 4)) {
      case 0: {
        // Truncated valid document.
        const std::string& v = rng.pick(valid);
        out.push_back(v.substr(0, rng.between(0, v.size() - 2)));
        break;
      }
      case 1: {
        std::string junk;
        for (std::size_t n = rng.between(1, 80); n > 0; --n) {
          junk.push_back(alphabet[rng.between(0, alphabet.size() - 1)]);
        }
        out.push_back(junk);
        break;
      }
      case 2: {
        std::string bytes;
        for (std::size_t n = rng.between(1, 64); n > 0; --n) {
          bytes.push_back(static_cast<char>(rng.between(0, 255)));
        }
        out.push_back(bytes);
        break;
      }
      case 3: {
        // Fence around a damaged document, or an unterminated fence.
        std::string v = rng.pick(valid);
        // Only characters outside string literals (or the quotes themselves)
        // are structural.
        std::vector<std::size_t> structural;
        bool in_string = false;
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (v[i] == '"' && (i == 0 || v[i - 1] != '\\')) {
            in_string = !in_string;
            structural.push_back(i);
          } else if (!in_string && std::string_view("{}[]:,").find(v[i]) != std::string_view::npos) {
            structural.push_back(i);
          }
        }
        v.erase(rng.pick(structural), 1);
        out.push_back("Answer:\n```json\n" + v + (rng.chance(0.5) ? "\n```" : ""));
        break;
      }
      default: {
        // Valid document with one byte flipped to a structural character.
        std::string v = rng.pick(valid);
        v[rng.between(0, v.size() - 1)] = rng.chance(0.5) ? '{' : '"';
        out.push_back("prefix " + v);
        break;
      }
    }
  }
  return out;
}

}  // namespace gen
