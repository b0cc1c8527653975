#include "nkpa/record.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace nkpa::synth {

namespace {

static_assert(std::endian::native == std::endian::little,
              "record io assumes a little-endian host");

constexpr char kMagic[4] = {'N', 'K', 'P', 'A'};
constexpr std::size_t kHeaderSize = 4 + 2 + 8 + 1 + 1 + 8 + 8 + 32;

template <typename T>
void put(std::string& buf, T v) {
  char tmp[sizeof(T)];
  std::memcpy(tmp, &v, sizeof(T));
  buf.append(tmp, sizeof(T));
}

template <typename T>
T take(const char*& p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  p += sizeof(T);
  return v;
}

}  // namespace

void write_record(const std::filesystem::path& path, const VoltageRecord& rec,
                  int bits) {
  std::string buf;
  buf.reserve(kHeaderSize + 2 * rec.samples.size());
  buf.append(kMagic, 4);
  put<std::uint16_t>(buf, kRecordFormatVersion);
  put<double>(buf, rec.fs);
  put<std::uint8_t>(buf, static_cast<std::uint8_t>(bits));
  put<std::uint8_t>(buf, static_cast<std::uint8_t>(rec.tag));
  put<std::uint64_t>(buf, rec.samples.size());
  put<std::uint64_t>(buf, rec.seed_used);
  buf.append(reinterpret_cast<const char*>(rec.config_digest.data()), 32);
  buf.append(reinterpret_cast<const char*>(rec.samples.data()),
             2 * rec.samples.size());

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw RecordIoException(RecordIoError::io_failure,
                            "cannot open for writing: " + path.string());
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os)
    throw RecordIoException(RecordIoError::io_failure,
                            "short write: " + path.string());
}

VoltageRecord read_record(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw RecordIoException(RecordIoError::io_failure,
                            "cannot open for reading: " + path.string());
  std::string header(kHeaderSize, '\0');
  is.read(header.data(), kHeaderSize);
  if (static_cast<std::size_t>(is.gcount()) != kHeaderSize)
    throw RecordIoException(RecordIoError::truncated_header,
                            "truncated header: " + path.string());
  const char* p = header.data();
  if (std::memcmp(p, kMagic, 4) != 0)
    throw RecordIoException(RecordIoError::bad_magic,
                            "bad magic bytes: " + path.string());
  p += 4;
  const auto version = take<std::uint16_t>(p);
  if (version != kRecordFormatVersion)
    throw RecordIoException(
        RecordIoError::bad_version,
        "unsupported format version " + std::to_string(version) + ": " +
            path.string());
  VoltageRecord rec;
  rec.fs = take<double>(p);
  take<std::uint8_t>(p);  // bits; payload slots are int16 regardless
  rec.tag = static_cast<RecordTag>(take<std::uint8_t>(p));
  const auto len = take<std::uint64_t>(p);
  rec.seed_used = take<std::uint64_t>(p);
  std::memcpy(rec.config_digest.data(), p, 32);

  rec.samples.resize(len);
  is.read(reinterpret_cast<char*>(rec.samples.data()),
          static_cast<std::streamsize>(2 * len));
  if (static_cast<std::uint64_t>(is.gcount()) != 2 * len)
    throw RecordIoException(RecordIoError::truncated_payload,
                            "truncated payload: " + path.string());
  return rec;
}

void write_records(const std::vector<std::filesystem::path>& paths,
                   const std::vector<VoltageRecord>& records, int bits) {
  if (paths.size() != records.size())
    throw std::invalid_argument("write_records: path/record count mismatch");
  for (std::size_t i = 0; i < paths.size(); ++i)
    write_record(paths[i], records[i], bits);
}

std::vector<VoltageRecord> read_records(
    const std::vector<std::filesystem::path>& paths) {
  std::vector<VoltageRecord> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(read_record(p));
  return out;
}

}  // namespace nkpa::synth
