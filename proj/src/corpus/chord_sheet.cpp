#include <sstream>

#include "filmscore/corpus.h"

namespace filmscore::corpus {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Splits `bar` (which starts at column `col` of its line) into chord tokens.
BarChords parse_bar(std::string_view bar, std::size_t col) {
  BarChords chords;
  std::size_t i = 0;
  while (i < bar.size()) {
    while (i < bar.size() && is_space(bar[i])) ++i;
    if (i >= bar.size()) break;
    const std::size_t start = i;
    while (i < bar.size() && !is_space(bar[i])) ++i;
    const std::string_view token = bar.substr(start, i - start);
    try {
      chords.push_back(parse_chord_symbol(token));
    } catch (const MalformedChord& e) {
      throw MalformedChord(e.token(), col + start + e.position());
    }
  }
  if (chords.empty()) throw MalformedChord(std::string(bar), col);
  if (chords.size() > 2) throw MalformedChord(std::string(bar), col);
  return chords;
}

}  // namespace

std::vector<ChordProgression> parse_chord_sheet(std::string_view doc) {
  std::vector<ChordProgression> out;
  std::size_t line_start = 0;
  while (line_start <= doc.size()) {
    std::size_t line_end = doc.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = doc.size();
    std::string_view line = doc.substr(line_start, line_end - line_start);
    std::size_t col = 0;

    const std::size_t colon = line.find(':');
    if (colon != std::string_view::npos) col = colon + 1;
    std::size_t first = col;
    while (first < line.size() && is_space(line[first])) ++first;

    if (first < line.size() && line[first] != '%') {
      ChordProgression prog;
      std::size_t bar_start = col;
      while (true) {
        const std::size_t bar_end = line.find('|', bar_start);
        const std::size_t stop = bar_end == std::string_view::npos ? line.size() : bar_end;
        prog.bars.push_back(parse_bar(line.substr(bar_start, stop - bar_start), bar_start));
        if (bar_end == std::string_view::npos) break;
        bar_start = bar_end + 1;
      }
      out.push_back(std::move(prog));
    }
    if (line_end == doc.size()) break;
    line_start = line_end + 1;
  }
  if (out.empty()) throw EmptyCorpus("chord sheet holds no progressions");
  return out;
}

std::string format_progression(const ChordProgression& p) {
  std::ostringstream os;
  for (std::size_t b = 0; b < p.bars.size(); ++b) {
    if (b) os << " | ";
    for (std::size_t c = 0; c < p.bars[b].size(); ++c) {
      if (c) os << ' ';
      os << format_chord(p.bars[b][c]);
    }
  }
  return os.str();
}

}  // namespace filmscore::corpus
