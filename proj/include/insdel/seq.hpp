#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "insdel/rng.hpp"

namespace insdel {

// Finite symbol set. Letters are stored as small integer indices everywhere;
// the alphabet maps them to printable characters at the I/O boundary.
class Alphabet {
 public:
  explicit Alphabet(std::string symbols);

  int size() const { return static_cast<int>(symbols_.size()); }
  char symbol(int letter) const { return symbols_.at(letter); }
  const std::string& symbols() const { return symbols_; }
  std::optional<int> index(char c) const;

  bool operator==(const Alphabet& other) const = default;

  static Alphabet toy() { return Alphabet("ABC"); }
  static Alphabet amino_acids() { return Alphabet("ACDEFGHIKLMNPQRSTVWY"); }

 private:
  std::string symbols_;
  int lookup_[256];
};

struct Sequence {
  std::string id;
  std::vector<std::uint8_t> letters;

  int size() const { return static_cast<int>(letters.size()); }
  bool empty() const { return letters.empty(); }
  std::uint8_t operator[](int i) const { return letters[i]; }

  std::string to_string(const Alphabet& a) const;
  static Sequence from_string(const std::string& s, const Alphabet& a,
                              std::string id = "");

  Sequence without(int position) const;  // copy with one letter removed

  bool operator==(const Sequence& other) const {
    return letters == other.letters;
  }
};

struct Corpus {
  Alphabet alphabet;
  std::vector<Sequence> sequences;

  int size() const { return static_cast<int>(sequences.size()); }
};

// FASTA and plain one-sequence-per-line formats. Parsers are strict: any
// character outside the alphabet aborts with the offending record and
// 1-based position.
Corpus parse_fasta(std::istream& in, const Alphabet& a);
Corpus parse_fasta_file(const std::string& path, const Alphabet& a);
void write_fasta(std::ostream& out, const Corpus& c, int line_width = 60);
void write_fasta_file(const std::string& path, const Corpus& c,
                      int line_width = 60);

Corpus parse_txt(std::istream& in, const Alphabet& a);
Corpus parse_txt_file(const std::string& path, const Alphabet& a);
void write_txt(std::ostream& out, const Corpus& c);

// Synthetic corpus over {A,B,C}: strictly alternating A/B strings, length
// uniform on [1, max_len], starting letter uniform.
Corpus toy_corpus(int n, int max_len, Rng& rng);

// true iff nonempty, uses only the first two toy letters, and no two adjacent
// letters are equal
bool is_alternating(const Sequence& x);

}  // namespace insdel
