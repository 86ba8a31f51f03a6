#include "insdel/seq.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace insdel {

Alphabet::Alphabet(std::string symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw std::invalid_argument("alphabet is empty");
  for (int& x : lookup_) x = -1;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const unsigned char c = symbols_[i];
    if (!std::isprint(c) || std::isspace(c))
      throw std::invalid_argument("alphabet symbols must be printable");
    if (lookup_[c] != -1)
      throw std::invalid_argument(std::string("duplicate alphabet symbol ") +
                                  symbols_[i]);
    lookup_[c] = static_cast<int>(i);
  }
}

std::optional<int> Alphabet::index(char c) const {
  const int i = lookup_[static_cast<unsigned char>(c)];
  if (i < 0) return std::nullopt;
  return i;
}

std::string Sequence::to_string(const Alphabet& a) const {
  std::string s;
  s.reserve(letters.size());
  for (auto l : letters) s.push_back(a.symbol(l));
  return s;
}

Sequence Sequence::from_string(const std::string& s, const Alphabet& a,
                               std::string id) {
  Sequence out;
  out.id = std::move(id);
  out.letters.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto idx = a.index(s[i]);
    if (!idx)
      throw std::runtime_error(std::string("unknown symbol ") + s[i] +
                               " at position " + std::to_string(i + 1));
    out.letters.push_back(static_cast<std::uint8_t>(*idx));
  }
  return out;
}

Sequence Sequence::without(int position) const {
  Sequence out;
  out.id = id;
  out.letters.reserve(letters.size() - 1);
  for (int i = 0; i < size(); ++i)
    if (i != position) out.letters.push_back(letters[i]);
  return out;
}

namespace {

void append_letters(Sequence& seq, const std::string& line,
                    const Alphabet& a, const std::string& record) {
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    const auto idx = a.index(c);
    if (!idx)
      throw std::runtime_error(
          std::string("unknown symbol ") + c + " at record " + record +
          ", position " + std::to_string(seq.letters.size() + 1));
    seq.letters.push_back(static_cast<std::uint8_t>(*idx));
  }
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

Corpus parse_fasta(std::istream& in, const Alphabet& a) {
  Corpus c{a, {}};
  std::string line;
  bool have_record = false;
  Sequence cur;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    if (line[0] == '>') {
      if (have_record) c.sequences.push_back(std::move(cur));
      cur = Sequence{};
      std::istringstream hdr(line.substr(1));
      hdr >> cur.id;
      if (cur.id.empty())
        cur.id = "record" + std::to_string(c.sequences.size() + 1);
      have_record = true;
    } else {
      if (!have_record)
        throw std::runtime_error("missing FASTA header before sequence data");
      append_letters(cur, line, a, cur.id);
    }
  }
  if (have_record) c.sequences.push_back(std::move(cur));
  if (c.sequences.empty()) throw std::runtime_error("empty FASTA: no records");
  return c;
}

Corpus parse_fasta_file(const std::string& path, const Alphabet& a) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_fasta(in, a);
}

void write_fasta(std::ostream& out, const Corpus& c, int line_width) {
  for (const auto& s : c.sequences) {
    out << '>' << s.id << '\n';
    const std::string text = s.to_string(c.alphabet);
    for (std::size_t i = 0; i < text.size(); i += line_width)
      out << text.substr(i, line_width) << '\n';
    if (text.empty()) out << '\n';
  }
}

void write_fasta_file(const std::string& path, const Corpus& c,
                      int line_width) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_fasta(out, c, line_width);
}

Corpus parse_txt(std::istream& in, const Alphabet& a) {
  Corpus c{a, {}};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    ++n;
    if (line.empty()) continue;
    Sequence s;
    s.id = "s" + std::to_string(n);
    append_letters(s, line, a, s.id);
    c.sequences.push_back(std::move(s));
  }
  if (c.sequences.empty()) throw std::runtime_error("empty input: no sequences");
  return c;
}

Corpus parse_txt_file(const std::string& path, const Alphabet& a) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_txt(in, a);
}

void write_txt(std::ostream& out, const Corpus& c) {
  for (const auto& s : c.sequences) out << s.to_string(c.alphabet) << '\n';
}

Corpus toy_corpus(int n, int max_len, Rng& rng) {
  if (n < 0 || max_len < 1)
    throw std::invalid_argument("toy_corpus: need n >= 0 and max_len >= 1");
  Corpus c{Alphabet::toy(), {}};
  c.sequences.reserve(n);
  for (int i = 0; i < n; ++i) {
    Sequence s;
    s.id = "toy" + std::to_string(i);
    const int len = 1 + static_cast<int>(rng.below(max_len));
    const int start = static_cast<int>(rng.below(2));
    s.letters.reserve(len);
    for (int j = 0; j < len; ++j)
      s.letters.push_back(static_cast<std::uint8_t>((start + j) % 2));
    c.sequences.push_back(std::move(s));
  }
  return c;
}

bool is_alternating(const Sequence& x) {
  if (x.empty()) return false;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] > 1) return false;
    if (i > 0 && x[i] == x[i - 1]) return false;
  }
  return true;
}

}  // namespace insdel
