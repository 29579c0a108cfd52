#include "medley/zip.hpp"

#include <zlib.h>

#include <cstring>

#include "medley/errors.hpp"

namespace medley::zip {

namespace {

constexpr uint32_t kLocalSig = 0x04034b50;
constexpr uint32_t kCentralSig = 0x02014b50;
constexpr uint32_t kEndSig = 0x06054b50;

uint16_t rd16(std::string_view b, size_t off) {
  return static_cast<uint8_t>(b[off]) | (static_cast<uint8_t>(b[off + 1]) << 8);
}

uint32_t rd32(std::string_view b, size_t off) {
  return static_cast<uint32_t>(static_cast<uint8_t>(b[off])) |
         (static_cast<uint32_t>(static_cast<uint8_t>(b[off + 1])) << 8) |
         (static_cast<uint32_t>(static_cast<uint8_t>(b[off + 2])) << 16) |
         (static_cast<uint32_t>(static_cast<uint8_t>(b[off + 3])) << 24);
}

void wr16(std::string& out, uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>((v >> 8) & 0xFF);
}

void wr32(std::string& out, uint32_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>((v >> 8) & 0xFF);
  out += static_cast<char>((v >> 16) & 0xFF);
  out += static_cast<char>((v >> 24) & 0xFF);
}

struct CentralEntry {
  std::string name;
  uint16_t method;
  uint32_t compressed_size;
  uint32_t uncompressed_size;
  uint32_t local_offset;
};

size_t find_end_record(std::string_view archive) {
  if (archive.size() < 22) throw MedleyError(Errc::NotAZipOrXml, "too short for a ZIP archive");
  size_t scan_start = archive.size() >= 22 + 65535 ? archive.size() - 22 - 65535 : 0;
  for (size_t off = archive.size() - 22 + 1; off-- > scan_start;) {
    if (rd32(archive, off) == kEndSig) return off;
  }
  throw MedleyError(Errc::NotAZipOrXml, "no end-of-central-directory record");
}

std::vector<CentralEntry> central_directory(std::string_view archive) {
  size_t end = find_end_record(archive);
  uint16_t count = rd16(archive, end + 10);
  uint32_t dir_offset = rd32(archive, end + 16);
  std::vector<CentralEntry> entries;
  size_t off = dir_offset;
  for (uint16_t i = 0; i < count; ++i) {
    if (off + 46 > archive.size() || rd32(archive, off) != kCentralSig)
      throw MedleyError(Errc::NotAZipOrXml, "corrupt central directory");
    CentralEntry e;
    e.method = rd16(archive, off + 10);
    e.compressed_size = rd32(archive, off + 20);
    e.uncompressed_size = rd32(archive, off + 24);
    uint16_t name_len = rd16(archive, off + 28);
    uint16_t extra_len = rd16(archive, off + 30);
    uint16_t comment_len = rd16(archive, off + 32);
    e.local_offset = rd32(archive, off + 42);
    if (off + 46 + name_len > archive.size())
      throw MedleyError(Errc::NotAZipOrXml, "corrupt central directory entry name");
    e.name.assign(archive.substr(off + 46, name_len));
    entries.push_back(std::move(e));
    off += 46 + name_len + extra_len + comment_len;
  }
  return entries;
}

constexpr size_t kMaxEntrySize = size_t{1} << 30;

std::string inflate_raw(std::string_view data, size_t expected_size) {
  if (expected_size > kMaxEntrySize)
    throw MedleyError(Errc::NotAZipOrXml, "entry declares an implausible uncompressed size");
  std::string out(expected_size, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK)
    throw MedleyError(Errc::IoFailure, "inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END)
    throw MedleyError(Errc::NotAZipOrXml, "deflated entry failed to decompress");
  out.resize(out.size() - zs.avail_out);
  return out;
}

}  // namespace

bool looks_like_zip(std::string_view bytes) {
  return bytes.size() >= 4 && bytes.substr(0, 2) == "PK";
}

std::vector<std::string> entry_names(std::string_view archive) {
  std::vector<std::string> names;
  for (auto& e : central_directory(archive)) names.push_back(e.name);
  return names;
}

std::string read_entry(std::string_view archive, std::string_view name) {
  for (const auto& e : central_directory(archive)) {
    if (e.name != name) continue;
    size_t off = e.local_offset;
    if (off + 30 > archive.size() || rd32(archive, off) != kLocalSig)
      throw MedleyError(Errc::NotAZipOrXml, "corrupt local header for " + e.name);
    uint16_t name_len = rd16(archive, off + 26);
    uint16_t extra_len = rd16(archive, off + 28);
    size_t data_off = off + 30 + name_len + extra_len;
    if (data_off + e.compressed_size > archive.size())
      throw MedleyError(Errc::NotAZipOrXml, "entry data out of bounds for " + e.name);
    std::string_view data = archive.substr(data_off, e.compressed_size);
    if (e.method == 0) return std::string(data);
    if (e.method == 8) return inflate_raw(data, e.uncompressed_size);
    throw MedleyError(Errc::NotAZipOrXml, "unsupported compression method for " + e.name);
  }
  throw MedleyError(Errc::MissingContainerRootfile, "no such entry: " + std::string(name));
}

std::string write_archive(const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string out;
  struct Placed {
    std::string name;
    uint32_t crc;
    uint32_t size;
    uint32_t offset;
  };
  std::vector<Placed> placed;
  for (const auto& [name, data] : entries) {
    Placed p;
    p.name = name;
    p.crc = static_cast<uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
    p.size = static_cast<uint32_t>(data.size());
    p.offset = static_cast<uint32_t>(out.size());
    wr32(out, kLocalSig);
    wr16(out, 20);      // version needed
    wr16(out, 0);       // flags
    wr16(out, 0);       // method: stored
    wr16(out, 0);       // mod time
    wr16(out, 0x21);    // mod date
    wr32(out, p.crc);
    wr32(out, p.size);
    wr32(out, p.size);
    wr16(out, static_cast<uint16_t>(name.size()));
    wr16(out, 0);       // extra length
    out += name;
    out += data;
    placed.push_back(std::move(p));
  }
  uint32_t dir_offset = static_cast<uint32_t>(out.size());
  for (const auto& p : placed) {
    wr32(out, kCentralSig);
    wr16(out, 20);
    wr16(out, 20);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0x21);
    wr32(out, p.crc);
    wr32(out, p.size);
    wr32(out, p.size);
    wr16(out, static_cast<uint16_t>(p.name.size()));
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr16(out, 0);
    wr32(out, 0);
    wr32(out, p.offset);
    out += p.name;
  }
  uint32_t dir_size = static_cast<uint32_t>(out.size()) - dir_offset;
  wr32(out, kEndSig);
  wr16(out, 0);
  wr16(out, 0);
  wr16(out, static_cast<uint16_t>(placed.size()));
  wr16(out, static_cast<uint16_t>(placed.size()));
  wr32(out, dir_size);
  wr32(out, dir_offset);
  wr16(out, 0);
  return out;
}

}  // namespace medley::zip
