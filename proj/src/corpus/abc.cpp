#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>

#include "filmscore/corpus.h"

namespace filmscore::corpus {

namespace {

struct Fraction {
  std::int64_t num = 1;
  std::int64_t den = 1;

  Fraction operator*(Fraction o) const {
    Fraction f{num * o.num, den * o.den};
    const std::int64_t g = std::gcd(f.num, f.den);
    return {f.num / g, f.den / g};
  }
};

struct KeySignature {
  std::array<int, 7> alteration{};  // per letter C D E F G A B
  std::optional<PitchClass> tonic;
};

int letter_index(char upper) {
  switch (upper) {
    case 'C': return 0;
    case 'D': return 1;
    case 'E': return 2;
    case 'F': return 3;
    case 'G': return 4;
    case 'A': return 5;
    case 'B': return 6;
  }
  return -1;
}

constexpr int kLetterSemitone[7] = {0, 2, 4, 5, 7, 9, 11};

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

KeySignature parse_key(const std::string& raw) {
  KeySignature key;
  std::string text = trim(raw);
  if (text.empty() || lower(text) == "none") return key;
  const int letter = letter_index(text[0]);
  if (letter < 0) throw InputError("unsupported key '" + text + "'");
  static constexpr int kLetterFifths[7] = {0, 2, 4, -1, 1, 3, 5};
  int fifths = kLetterFifths[letter];
  int tonic = kLetterSemitone[letter];
  std::size_t pos = 1;
  if (pos < text.size() && (text[pos] == '#' || text[pos] == 'b')) {
    const int sign = text[pos] == '#' ? 1 : -1;
    fifths += 7 * sign;
    tonic += sign;
    ++pos;
  }
  std::string mode = lower(trim(text.substr(pos)));
  const auto space = mode.find(' ');
  if (space != std::string::npos) mode = mode.substr(0, space);
  int offset = 0;
  if (mode.empty() || mode.rfind("maj", 0) == 0 || mode.rfind("ion", 0) == 0) {
    offset = 0;
  } else if (mode == "m" || mode.rfind("min", 0) == 0 || mode.rfind("aeo", 0) == 0) {
    offset = -3;
  } else if (mode.rfind("dor", 0) == 0) {
    offset = -2;
  } else if (mode.rfind("phr", 0) == 0) {
    offset = -4;
  } else if (mode.rfind("lyd", 0) == 0) {
    offset = 1;
  } else if (mode.rfind("mix", 0) == 0) {
    offset = -1;
  } else if (mode.rfind("loc", 0) == 0) {
    offset = -5;
  } else {
    throw InputError("unsupported key mode '" + mode + "'");
  }
  fifths += offset;
  if (fifths > 7 || fifths < -7) throw InputError("unsupported key '" + text + "'");
  static constexpr int kSharpOrder[7] = {3, 0, 4, 1, 5, 2, 6};  // F C G D A E B
  static constexpr int kFlatOrder[7] = {6, 2, 5, 1, 4, 0, 3};   // B E A D G C F
  for (int i = 0; i < fifths; ++i) key.alteration[kSharpOrder[i]] = 1;
  for (int i = 0; i < -fifths; ++i) key.alteration[kFlatOrder[i]] = -1;
  key.tonic = PitchClass(tonic);
  return key;
}

Meter parse_meter(const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "C" || lower(text) == "none" || text.empty()) return {4, 4};
  if (text == "C|") return {2, 2};
  const auto slash = text.find('/');
  if (slash == std::string::npos) throw InputError("unsupported meter '" + text + "'");
  try {
    const int num = std::stoi(text.substr(0, slash));
    const int den = std::stoi(text.substr(slash + 1));
    if (num <= 0 || den <= 0 || kTicksPerWhole % den != 0) throw InputError("bad meter");
    return {num, den};
  } catch (const std::logic_error&) {
    throw InputError("unsupported meter '" + text + "'");
  }
}

Fraction parse_fraction_field(const std::string& raw) {
  const std::string text = trim(raw);
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return {std::stoll(text), 1};
    const std::int64_t num = std::stoll(text.substr(0, slash));
    const std::int64_t den = std::stoll(text.substr(slash + 1));
    if (num <= 0 || den <= 0) throw InputError("bad unit length");
    return Fraction{num, den} * Fraction{1, 1};
  } catch (const std::logic_error&) {
    throw InputError("unsupported unit length '" + text + "'");
  }
}

struct Item {
  Tick ticks = 0;
  int pitch = -1;  // -1 = rest
  bool tie_out = false;
};

class BodyParser {
 public:
  BodyParser(Meter meter, Fraction unit, KeySignature key) : meter_(meter), unit_(unit), key_(key) {}

  void set_key(KeySignature k) { key_ = k; }
  void set_unit(Fraction u) { unit_ = u; }
  void set_meter(Meter m) { meter_ = m; }
  Meter meter() const { return meter_; }

  void feed(std::string_view line) {
    text_ = line;
    pos_ = 0;
    while (pos_ < text_.size()) step();
  }

  std::vector<Item> finish() {
    if (tuplet_left_ > 0) throw InputError("unterminated tuplet");
    if (broken_pending_) throw InputError("broken rhythm without a following note");
    return std::move(out_);
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw InputError(why + " near '" + std::string(text_.substr(pos_, 12)) + "'");
  }

  void step() {
    const char c = peek();
    if (std::isspace(static_cast<unsigned char>(c)) || c == '\\') {
      ++pos_;
    } else if (c == '"') {
      const auto close = text_.find('"', pos_ + 1);
      if (close == std::string_view::npos) fail("unterminated annotation");
      pos_ = close + 1;
    } else if (c == '!') {
      const auto close = text_.find('!', pos_ + 1);
      if (close == std::string_view::npos) fail("unterminated decoration");
      pos_ = close + 1;
    } else if (c == '~' || c == '.') {
      ++pos_;
    } else if (c == '|' || c == ':' || (c == '[' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      bar_line();
    } else if (c == '[' && peek(1) == '|') {
      pos_ += 2;
      bar_reset();
      repeat_start_ = out_.size();
      ending_start_.reset();
    } else if (c == '(') {
      tuplet();
    } else if (c == '-') {
      if (out_.empty() || out_.back().pitch < 0) fail("tie without a preceding note");
      out_.back().tie_out = true;
      ++pos_;
    } else if (c == '>' || c == '<') {
      broken(c);
    } else if (c == '{') {
      fail("grace notes are not supported");
    } else if (c == '[') {
      fail("chords and inline fields are not supported");
    } else if (c == '^' || c == '_' || c == '=' || letter_index(static_cast<char>(std::toupper(c))) >= 0 ||
               c == 'z' || c == 'x') {
      note();
    } else {
      fail(std::string("unsupported symbol '") + c + "'");
    }
  }

  void bar_reset() { bar_accidentals_.clear(); }

  void end_repeat() {
    const std::size_t stop = ending_start_.value_or(out_.size());
    std::vector<Item> section(out_.begin() + static_cast<std::ptrdiff_t>(repeat_start_),
                              out_.begin() + static_cast<std::ptrdiff_t>(stop));
    for (auto& item : section) append(item);
    repeat_start_ = out_.size();
    ending_start_.reset();
  }

  void bar_line() {
    // Collect the whole bar-line token: runs of | : [ ] followed by an
    // optional ending number.
    std::size_t start = pos_;
    while (pos_ < text_.size() && (peek() == '|' || peek() == ':' || peek() == ']' ||
                                   (peek() == '[' && pos_ == start))) {
      ++pos_;
    }
    std::string token(text_.substr(start, pos_ - start));
    int ending = 0;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      ending = peek() - '0';
      ++pos_;
    }
    bar_reset();

    const bool closes = token.find(":|") != std::string::npos || token == "::" ||
                        (token.size() >= 2 && token.front() == ':' && token.find('|') == std::string::npos);
    const bool opens = token.find("|:") != std::string::npos || token == "::";
    if (token == "[" && ending == 0) fail("unexpected '['");
    if (closes) end_repeat();
    if (token == "||" || token == "|]" || token == "[|") {
      repeat_start_ = out_.size();
      ending_start_.reset();
    }
    if (opens) {
      repeat_start_ = out_.size();
      ending_start_.reset();
    }
    if (ending == 1) {
      ending_start_ = out_.size();
    } else if (ending > 2) {
      fail("only first and second endings are supported");
    }
  }

  void tuplet() {
    ++pos_;
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("slurs are not supported");
    const int p = peek() - '0';
    ++pos_;
    int q = 0;
    switch (p) {
      case 2: q = 3; break;
      case 3: q = 2; break;
      case 4: q = 3; break;
      default: fail("unsupported tuplet");
    }
    tuplet_factor_ = Fraction{q, p};
    tuplet_left_ = p;
  }

  void broken(char c) {
    if (out_.empty()) fail("broken rhythm without a preceding note");
    if (peek(1) == '>' || peek(1) == '<') fail("only single broken rhythm marks are supported");
    Item& prev = out_.back();
    const Fraction grow{3, 2};
    const Fraction shrink{1, 2};
    prev.ticks = scale(prev.ticks, c == '>' ? grow : shrink);
    broken_factor_ = c == '>' ? shrink : grow;
    broken_pending_ = true;
    ++pos_;
  }

  Tick scale(Tick ticks, Fraction f) const {
    const std::int64_t n = ticks * f.num;
    if (n % f.den != 0) throw InputError("duration not representable at 480 ticks per quarter");
    return n / f.den;
  }

  Fraction length_suffix() {
    std::int64_t num = 1;
    std::int64_t den = 1;
    std::size_t digits_start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (pos_ > digits_start) num = std::stoll(std::string(text_.substr(digits_start, pos_ - digits_start)));
    if (peek() == '/') {
      den = 2;
      ++pos_;
      std::size_t d0 = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (pos_ > d0) {
        den = std::stoll(std::string(text_.substr(d0, pos_ - d0)));
      } else {
        while (peek() == '/') {
          den *= 2;
          ++pos_;
        }
      }
    }
    if (num <= 0 || den <= 0) fail("bad note length");
    return Fraction{num, den} * Fraction{1, 1};
  }

  void note() {
    int explicit_alt = 0;
    bool has_explicit = false;
    while (peek() == '^' || peek() == '_' || peek() == '=') {
      has_explicit = true;
      if (peek() == '^') ++explicit_alt;
      if (peek() == '_') --explicit_alt;
      if (peek() == '=') explicit_alt = 0;
      ++pos_;
    }
    const char c = peek();
    int pitch = -1;
    if (c == 'z' || c == 'x') {
      if (has_explicit) fail("accidental on a rest");
      ++pos_;
    } else {
      const int letter = letter_index(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      if (letter < 0) fail("accidental without a note");
      int octave = std::islower(static_cast<unsigned char>(c)) ? 1 : 0;
      ++pos_;
      while (peek() == '\'' || peek() == ',') {
        octave += peek() == '\'' ? 1 : -1;
        ++pos_;
      }
      const int slot = letter * 100 + octave;
      int alt = key_.alteration[static_cast<std::size_t>(letter)];
      if (has_explicit) {
        bar_accidentals_[slot] = explicit_alt;
        alt = explicit_alt;
      } else if (auto it = bar_accidentals_.find(slot); it != bar_accidentals_.end()) {
        alt = it->second;
      }
      pitch = 60 + 12 * octave + kLetterSemitone[letter] + alt;
      if (pitch < 0 || pitch > 127) fail("pitch out of MIDI range");
    }

    Fraction length = unit_ * length_suffix();
    if (tuplet_left_ > 0) {
      length = length * tuplet_factor_;
      --tuplet_left_;
    }
    if (broken_pending_) {
      length = length * broken_factor_;
      broken_pending_ = false;
    }
    const std::int64_t n = kTicksPerWhole * length.num;
    if (n % length.den != 0) throw InputError("duration not representable at 480 ticks per quarter");
    append(Item{n / length.den, pitch, false});
  }

  void append(Item item) {
    if (!out_.empty() && out_.back().tie_out) {
      Item& prev = out_.back();
      prev.tie_out = false;
      if (item.pitch >= 0 && item.pitch == prev.pitch) {
        prev.ticks += item.ticks;
        prev.tie_out = item.tie_out;
        return;
      }
    }
    out_.push_back(item);
  }

  Meter meter_;
  Fraction unit_;
  KeySignature key_;
  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Item> out_;
  std::map<int, int> bar_accidentals_;
  std::size_t repeat_start_ = 0;
  std::optional<std::size_t> ending_start_;
  Fraction tuplet_factor_{1, 1};
  int tuplet_left_ = 0;
  Fraction broken_factor_{1, 1};
  bool broken_pending_ = false;
};

bool is_field_line(std::string_view line) {
  return line.size() >= 2 && std::isalpha(static_cast<unsigned char>(line[0])) && line[1] == ':';
}

Fraction default_unit(Meter m) {
  return static_cast<double>(m.beats_per_bar) / m.beat_unit < 0.75 ? Fraction{1, 16} : Fraction{1, 8};
}

std::vector<std::string_view> split_lines(std::string_view doc) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= doc.size()) {
    std::size_t end = doc.find('\n', start);
    if (end == std::string_view::npos) end = doc.size();
    std::string_view line = doc.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == doc.size()) break;
    start = end + 1;
  }
  return lines;
}

}  // namespace

Melody parse_abc_tune(std::string_view tune) {
  const auto lines = split_lines(tune);
  Melody m;
  Meter meter{4, 4};
  std::optional<Fraction> unit;
  KeySignature key;
  bool seen_x = false;
  std::optional<BodyParser> body;

  for (std::string_view raw : lines) {
    std::string_view line = raw;
    if (!line.empty() && line.front() == '%') continue;
    if (const auto pct = line.find('%'); pct != std::string_view::npos) line = line.substr(0, pct);
    if (trim(line).empty()) continue;

    if (is_field_line(line)) {
      const char field = line[0];
      const std::string value = trim(line.substr(2));
      if (!seen_x) {
        if (field != 'X') throw InputError("tune must start with an X: field");
        seen_x = true;
        continue;
      }
      switch (field) {
        case 'T':
          if (m.title.empty()) m.title = value;
          break;
        case 'M':
          meter = parse_meter(value);
          if (body) body->set_meter(meter);
          break;
        case 'L':
          unit = parse_fraction_field(value);
          if (body) body->set_unit(*unit);
          break;
        case 'K':
          key = parse_key(value);
          if (!body) {
            m.key_tonic = key.tonic;
            body.emplace(meter, unit.value_or(default_unit(meter)), key);
          } else {
            body->set_key(key);
          }
          break;
        default:
          break;
      }
      continue;
    }
    if (!seen_x) throw InputError("tune must start with an X: field");
    if (!body) throw InputError("music before the K: field");
    body->feed(line);
  }
  if (!body) throw InputError("tune has no K: field");

  m.meter = meter;
  const std::vector<Item> items = body->finish();
  Tick t = 0;
  for (const Item& item : items) {
    if (item.pitch >= 0) {
      NoteEvent e;
      e.onset = t;
      e.duration = item.ticks;
      e.pitch = item.pitch;
      m.events.push_back(e);
    }
    t += item.ticks;
  }
  if (m.events.empty()) throw InputError("tune has no notes");
  const Tick bar = m.meter.bar_ticks();
  m.length_bars = static_cast<int>((t + bar - 1) / bar);
  return m;
}

MelodyCorpus parse_melody_corpus(std::string_view doc) {
  MelodyCorpus out;
  const auto lines = split_lines(doc);
  std::vector<std::pair<std::string, std::string>> tunes;  // (X value, text)
  for (std::string_view line : lines) {
    if (line.size() >= 2 && line[0] == 'X' && line[1] == ':') {
      tunes.emplace_back(trim(line.substr(2)), std::string());
    }
    if (!tunes.empty()) {
      tunes.back().second.append(line);
      tunes.back().second.push_back('\n');
    }
  }
  for (const auto& [number, text] : tunes) {
    try {
      out.melodies.push_back(parse_abc_tune(text));
    } catch (const InputError& e) {
      out.diagnostics.push_back("tune X:" + number + " skipped: " + e.what());
    }
  }
  if (out.melodies.empty()) throw EmptyCorpus("no tune in the melody corpus parsed");
  return out;
}

namespace {

std::string abc_length(Tick ticks) {
  constexpr Tick kUnit = kTicksPerWhole / 8;
  const Tick g = std::gcd(ticks, kUnit);
  const Tick num = ticks / g;
  const Tick den = kUnit / g;
  if (den == 1) return num == 1 ? "" : std::to_string(num);
  if (num == 1) return "/" + std::to_string(den);
  return std::to_string(num) + "/" + std::to_string(den);
}

class AbcWriter {
 public:
  explicit AbcWriter(Tick bar_ticks) : bar_ticks_(bar_ticks) {}

  // Writes a note or rest of `ticks` starting at the current position,
  // splitting at bar lines.
  void emit(int pitch, Tick ticks) {
    while (ticks > 0) {
      const Tick room = bar_ticks_ - (pos_ % bar_ticks_);
      const Tick piece = std::min(ticks, room);
      if (pitch >= 0) {
        os_ << note_name(pitch);
      } else {
        os_ << 'z';
      }
      os_ << abc_length(piece);
      ticks -= piece;
      pos_ += piece;
      if (ticks > 0 && pitch >= 0) os_ << '-';
      if (pos_ % bar_ticks_ == 0) {
        os_ << " | ";
        accidentals_.clear();
      }
    }
  }

  Tick position() const { return pos_; }
  std::string str() const { return os_.str(); }

 private:
  std::string note_name(int pitch) {
    static constexpr int kLetter[12] = {0, 0, 1, 1, 2, 3, 3, 4, 4, 5, 5, 6};
    static constexpr bool kSharp[12] = {false, true, false, true, false, false,
                                        true,  false, true, false, true, false};
    static constexpr char kNames[7] = {'C', 'D', 'E', 'F', 'G', 'A', 'B'};
    const int pc = pitch % 12;
    const int octave = pitch / 12 - 5;
    const int letter = kLetter[pc];
    const int alt = kSharp[pc] ? 1 : 0;
    const int slot = letter * 100 + octave;
    std::string out;
    auto it = accidentals_.find(slot);
    const int current = it == accidentals_.end() ? 0 : it->second;
    if (alt != current) {
      out += alt ? "^" : "=";
      accidentals_[slot] = alt;
    }
    if (octave >= 1) {
      out += static_cast<char>(std::tolower(kNames[letter]));
      out += std::string(static_cast<std::size_t>(octave - 1), '\'');
    } else {
      out += kNames[letter];
      out += std::string(static_cast<std::size_t>(-octave), ',');
    }
    return out;
  }

  Tick bar_ticks_;
  Tick pos_ = 0;
  std::ostringstream os_;
  std::map<int, int> accidentals_;
};

}  // namespace

std::string format_abc(const Melody& m, int index) {
  std::ostringstream os;
  os << "X:" << index << '\n';
  if (!m.title.empty()) os << "T:" << m.title << '\n';
  os << "M:" << m.meter.beats_per_bar << '/' << m.meter.beat_unit << '\n';
  os << "L:1/8\n";
  os << "K:C\n";
  AbcWriter w(m.meter.bar_ticks());
  for (const NoteEvent& e : m.events) {
    if (e.onset > w.position()) w.emit(-1, e.onset - w.position());
    w.emit(e.pitch, e.duration);
  }
  if (m.length_ticks() > w.position()) w.emit(-1, m.length_ticks() - w.position());
  std::string body = w.str();
  while (!body.empty() && body.back() == ' ') body.pop_back();
  os << body << '\n';
  return os.str();
}

}  // namespace filmscore::corpus
