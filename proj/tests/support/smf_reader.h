#pragma once

// Standalone Standard MIDI File reader for tests. Written from the MIDI 1.0
// file format description only; it shares no code with the writer.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace smf {

struct ReadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Event {
  std::uint64_t tick = 0;  // absolute
  std::uint8_t status = 0;  // 0xFF for meta, 0xF0/0xF7 for sysex
  std::uint8_t meta_type = 0;
  std::vector<std::uint8_t> data;

  int channel() const { return status & 0x0F; }
  int kind() const { return status & 0xF0; }
  bool note_on() const { return kind() == 0x90 && data.size() == 2 && data[1] > 0; }
  bool note_off() const { return kind() == 0x80 || (kind() == 0x90 && data.size() == 2 && data[1] == 0); }
};

struct Track {
  std::vector<Event> events;
  bool ended = false;  // saw End of Track as the last event
};

struct File {
  int format = 0;
  int division = 0;
  std::vector<Track> tracks;
};

/// Throws ReadError on any structural problem: bad chunk headers, truncated
/// data, running status without a previous status, non-minimal or overlong
/// variable-length quantities, a missing End of Track.
File read(const std::vector<std::uint8_t>& bytes);

struct Note {
  std::uint64_t on = 0;
  std::uint64_t off = 0;
  int pitch = 0;
  int velocity = 0;
  int channel = 0;
};

/// Pair note-ons with their note-offs (first on, first off per pitch).
/// Throws ReadError for an unmatched event.
std::vector<Note> notes(const Track& t);

/// Tempo meta events as (tick, microseconds per quarter).
std::vector<std::pair<std::uint64_t, std::uint32_t>> tempos(const Track& t);

}  // namespace smf
