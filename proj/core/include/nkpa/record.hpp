#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace nkpa::synth {

enum class RecordTag : std::uint8_t { off = 0, on = 1 };

// One digitized IF trace (one channel, one ON or OFF acquisition).
struct VoltageRecord {
  std::vector<std::int16_t> samples;
  double fs = 0.0;
  RecordTag tag = RecordTag::off;
  std::uint64_t seed_used = 0;
  std::array<std::uint8_t, 32> config_digest{};
};

enum class RecordIoError {
  io_failure,
  bad_magic,
  bad_version,
  truncated_header,
  truncated_payload,
  digest_mismatch,
};

struct RecordIoException : std::runtime_error {
  RecordIoException(RecordIoError c, const std::string& what)
      : std::runtime_error(what), code(c) {}
  RecordIoError code;
};

inline constexpr std::uint16_t kRecordFormatVersion = 1;

// Binary record file: magic "NKPA", version u16, fs f64, bits u8, tag u8,
// record_len u64, seed u64, config digest (32 bytes), then record_len
// little-endian int16 codes.
void write_record(const std::filesystem::path& path, const VoltageRecord& rec,
                  int bits);
VoltageRecord read_record(const std::filesystem::path& path);

// Convenience plural forms; file names are caller-chosen via `paths`.
void write_records(const std::vector<std::filesystem::path>& paths,
                   const std::vector<VoltageRecord>& records, int bits);
std::vector<VoltageRecord> read_records(
    const std::vector<std::filesystem::path>& paths);

}  // namespace nkpa::synth
