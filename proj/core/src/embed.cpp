#include "pec/embed.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "pec/corpus.hpp"

namespace pec {

std::string_view to_string(OovPolicy p) { return p == OovPolicy::zero ? "zero" : "mean"; }

OovPolicy parse_oov_policy(std::string_view text) {
  if (text == "zero") return OovPolicy::zero;
  if (text == "mean") return OovPolicy::mean;
  throw ConfigError("oov policy must be zero or mean; got \"" + std::string(text) + "\"");
}

EmbeddingTable::EmbeddingTable(std::size_t dim, OovPolicy oov)
    : dim_(dim), oov_(oov), zeros_(dim, 0.0), mean_(dim, 0.0), sum_(dim, 0.0) {
  if (dim == 0) throw ConfigError("embedding dimension must be > 0");
}

bool EmbeddingTable::add(const std::string& token, std::span<const double> vector) {
  if (vector.size() != dim_) throw ConfigError("embedding vector has wrong dimension");
  auto [it, inserted] = index_.emplace(token, index_.size());
  if (!inserted) return false;
  vectors_.insert(vectors_.end(), vector.begin(), vector.end());
  for (std::size_t k = 0; k < dim_; ++k) sum_[k] += vector[k];
  refresh_mean();
  return true;
}

void EmbeddingTable::refresh_mean() {
  const double n = static_cast<double>(index_.size());
  for (std::size_t k = 0; k < dim_; ++k) mean_[k] = n > 0 ? sum_[k] / n : 0.0;
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingTable::lookup(std::string_view token) const {
  if (auto row = find(token)) return {vectors_.data() + *row * dim_, dim_};
  return oov_ == OovPolicy::zero ? std::span<const double>(zeros_) : std::span<const double>(mean_);
}

namespace {

bool parse_double(std::string_view text, double& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

EmbeddingTable load_embeddings(std::istream& in, std::size_t dim, OovPolicy oov, Diagnostics* diagnostics) {
  EmbeddingTable table(dim, oov);
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> vec(dim);
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() < dim + 1) {
      throw ParseError(line_no, "expected " + std::to_string(dim) + " floats, found " +
                                    std::to_string(fields.size() - 1));
    }
    const std::size_t token_fields = fields.size() - dim;
    // Multi-word tokens are allowed, but a numeric second field means the
    // line simply has too many floats.
    double probe = 0.0;
    if (token_fields > 1 && parse_double(fields[1], probe)) {
      throw ParseError(line_no, "expected " + std::to_string(dim) + " floats, found " +
                                    std::to_string(fields.size() - 1));
    }
    std::string token = fields[0];
    for (std::size_t i = 1; i < token_fields; ++i) token += " " + fields[i];
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_double(fields[token_fields + k], vec[k])) {
        throw ParseError(line_no, "invalid number \"" + fields[token_fields + k] + "\"");
      }
    }
    if (!table.add(token, vec) && diagnostics != nullptr) {
      diagnostics->warn("line " + std::to_string(line_no) + ": duplicate token \"" + token + "\" ignored");
    }
  }
  return table;
}

std::unordered_set<std::string> load_stopwords(std::istream& in) {
  std::unordered_set<std::string> out;
  std::string word;
  while (in >> word) out.insert(word);
  return out;
}

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string strip_suffix(std::string_view word) {
  std::string w(word);
  if (w.size() < 4) return w;
  if (w.size() > 4 && ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
  if (ends_with(w, "sses")) return w.substr(0, w.size() - 2);
  if (ends_with(w, "xes") || ends_with(w, "ches") || ends_with(w, "shes")) return w.substr(0, w.size() - 2);
  if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is")) {
    return w.substr(0, w.size() - 1);
  }
  return w;
}

std::vector<std::string> preprocess(std::string_view text, const TokenPipeline& pipeline) {
  std::string buf;
  buf.reserve(text.size());
  for (char ch : text) {
    const auto uc = static_cast<unsigned char>(ch);
    if (pipeline.strip_punctuation && std::ispunct(uc)) {
      if (ch != '\'') buf.push_back(' ');
      continue;
    }
    buf.push_back(pipeline.lowercase ? static_cast<char>(std::tolower(uc)) : ch);
  }

  std::vector<std::string> tokens;
  for (auto& tok : split_whitespace(buf)) {
    if (pipeline.stopwords && pipeline.stopwords->count(tok)) continue;
    std::string stem = pipeline.stemmer == Stemmer::suffix ? strip_suffix(tok) : std::move(tok);
    // a stem can collide with a stopword ("yous" -> "you")
    if (pipeline.stopwords && pipeline.stopwords->count(stem)) continue;
    tokens.push_back(std::move(stem));
  }
  return tokens;
}

std::vector<double> encode_utterance(std::span<const std::string> tokens, const EmbeddingTable& table,
                                     std::size_t max_tokens) {
  const std::size_t dim = table.dim();
  std::vector<double> out(max_tokens * dim, 0.0);
  const std::size_t n = std::min(tokens.size(), max_tokens);
  for (std::size_t i = 0; i < n; ++i) {
    auto v = table.lookup(tokens[i]);
    std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }
  return out;
}

}  // namespace pec
