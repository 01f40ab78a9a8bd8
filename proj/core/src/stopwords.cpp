#include "pec/embed.hpp"

namespace pec {

// Common English function words (pronouns, auxiliaries, determiners,
// prepositions, conjunctions). 150 entries.
std::unordered_set<std::string> TokenPipeline::default_stopwords() {
  return {
      "i",       "me",      "my",      "myself",  "we",         "our",     "ours",    "ourselves", "you",
      "your",    "yours",   "yourself", "yourselves", "he",     "him",     "his",     "himself",   "she",
      "her",     "hers",    "herself", "it",      "its",        "itself",  "they",    "them",      "their",
      "theirs",  "themselves", "what", "which",   "who",        "whom",    "this",    "that",      "these",
      "those",   "am",      "is",      "are",     "was",        "were",    "be",      "been",      "being",
      "have",    "has",     "had",     "having",  "do",         "does",    "did",     "doing",     "a",
      "an",      "the",     "and",     "but",     "if",         "or",      "because", "as",        "until",
      "while",   "of",      "at",      "by",      "for",        "with",    "about",   "against",   "between",
      "into",    "through", "during",  "before",  "after",      "above",   "below",   "to",        "from",
      "up",      "down",    "in",      "out",     "on",         "off",     "over",    "under",     "again",
      "further", "then",    "once",    "here",    "there",      "when",    "where",   "why",       "how",
      "all",     "any",     "both",    "each",    "few",        "more",    "most",    "other",     "some",
      "such",    "only",    "own",     "same",    "so",         "than",    "too",     "very",      "s",
      "t",       "can",     "will",    "just",    "should",     "now",     "d",       "ll",        "m",
      "o",       "re",      "ve",      "y",       "would",      "could",   "shall",   "may",       "might",
      "must",    "also",    "yet",     "upon",    "whose",      "whether", "though",  "thus",      "ever",
      "per",     "via",     "onto",    "nor",     "within",     "without",
  };
}

}  // namespace pec
