// LILIS1 snapshot layout (all fields little-endian):
//
//   header   magic "LILIS1" | u16 version | u64 total | u32 partition_count |
//            u8 key_tag | u32 epsilon | u32 radix_bits | u32 zorder_bits |
//            f64[4] key_domain | f64[4] global_mbr | u8 strategy_tag | u32 a | u32 b |
//            u32 crc32(header bytes after the magic)
//   block*   u32 body_length | body | u32 crc32(body)
//   body     u32 id | u8 overflow | u64 count | f64[4] mbr |
//            count * (f64 key, f64 x, f64 y, u64 payload) |
//            u8 has_index [ u64 size | u32 epsilon | u32 knot_count |
//                           knot_count * (f64 key, u64 position) |
//                           u8 has_radix [ u32 bits | f64 min | f64 max | f64 scale |
//                                          u32 table_len | table_len * u32 ] ]

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "lilis/error.hpp"
#include "lilis/storage.hpp"

namespace lilis {

std::uint32_t crc32(std::string_view bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes a uInt length; feed large buffers in chunks.
  const auto* data = reinterpret_cast<const Bytef*>(bytes.data());
  std::size_t left = bytes.size();
  while (left > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = ::crc32(crc, data, chunk);
    data += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void rect(const Rect& r) {
    f64(r.x_lo);
    f64(r.y_lo);
    f64(r.x_hi);
    f64(r.y_hi);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string& str() { return out_; }

 private:
  void le(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : in_(bytes) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  Rect rect() {
    Rect r;
    r.x_lo = f64();
    r.y_lo = f64();
    r.x_hi = f64();
    r.y_hi = f64();
    return r;
  }
  std::string_view take(std::size_t n) {
    need(n);
    const auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw FormatError("snapshot is truncated");
  }
  std::uint64_t le(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

void encode_partition(Writer& w, const Partition& p) {
  const auto& d = p.descriptor;
  w.u32(d.id);
  w.u8(d.overflow ? 1 : 0);
  w.u64(d.count);
  w.rect(d.mbr);
  for (const auto& o : p.objects) {
    w.f64(o.key);
    w.f64(o.x);
    w.f64(o.y);
    w.u64(o.payload);
  }
  w.u8(p.index ? 1 : 0);
  if (!p.index) return;
  const SplineIndex& idx = *p.index;
  w.u64(idx.size());
  w.u32(static_cast<std::uint32_t>(idx.epsilon()));
  w.u32(static_cast<std::uint32_t>(idx.knots().size()));
  for (const auto& k : idx.knots()) {
    w.f64(k.key);
    w.u64(k.position);
  }
  w.u8(idx.radix() ? 1 : 0);
  if (!idx.radix()) return;
  const RadixTable& t = *idx.radix();
  w.u32(static_cast<std::uint32_t>(t.bits()));
  w.f64(t.min_key());
  w.f64(t.max_key());
  w.f64(t.scale());
  w.u32(static_cast<std::uint32_t>(t.table().size()));
  for (auto v : t.table()) w.u32(v);
}

Partition decode_partition(Reader& r) {
  Partition p;
  auto& d = p.descriptor;
  d.id = r.u32();
  d.overflow = r.u8() != 0;
  d.count = r.u64();
  d.mbr = r.rect();
  if (d.count > r.remaining() / 32) throw FormatError("partition record count exceeds block");
  p.objects.resize(d.count);
  for (auto& o : p.objects) {
    o.key = r.f64();
    o.x = r.f64();
    o.y = r.f64();
    o.payload = r.u64();
  }
  if (r.u8() == 0) {
    if (d.count != 0) throw FormatError("non-empty partition without an index");
    return p;
  }
  const std::uint64_t size = r.u64();
  const auto epsilon = static_cast<int>(r.u32());
  const std::uint32_t knot_count = r.u32();
  if (knot_count > r.remaining() / 16) throw FormatError("knot count exceeds block");
  std::vector<SplineKnot> knots(knot_count);
  for (auto& k : knots) {
    k.key = r.f64();
    k.position = r.u64();
  }
  std::optional<RadixTable> radix;
  if (r.u8() != 0) {
    const auto bits = static_cast<int>(r.u32());
    const double min_key = r.f64();
    const double max_key = r.f64();
    const double scale = r.f64();
    const std::uint32_t len = r.u32();
    if (len > r.remaining() / 4) throw FormatError("radix table exceeds block");
    std::vector<std::uint32_t> table(len);
    for (auto& v : table) v = r.u32();
    try {
      radix = RadixTable::from_parts(bits, min_key, max_key, scale, std::move(table));
    } catch (const InvalidArgument& e) {
      throw FormatError(std::string("bad radix table: ") + e.what());
    }
  }
  if (size != d.count) throw FormatError("index size does not match partition count");
  try {
    p.index = SplineIndex::from_parts(std::move(knots), epsilon, size, std::move(radix));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("bad spline index: ") + e.what());
  }
  return p;
}

}  // namespace

std::string encode_snapshot(const PartitionedDataset& ds) {
  Writer header;
  header.u16(kSnapshotVersion);
  header.u64(ds.total);
  header.u32(static_cast<std::uint32_t>(ds.partitions.size()));
  header.u8(static_cast<std::uint8_t>(ds.key.kind));
  header.u32(static_cast<std::uint32_t>(ds.epsilon));
  header.u32(static_cast<std::uint32_t>(ds.radix_bits));
  header.u32(static_cast<std::uint32_t>(ds.key.bits_per_dim));
  header.rect(ds.key.domain);
  header.rect(ds.global_mbr);
  header.u8(static_cast<std::uint8_t>(ds.strategy.kind));
  header.u32(ds.strategy.a);
  header.u32(ds.strategy.b);

  Writer out;
  out.raw({kSnapshotMagic, sizeof(kSnapshotMagic)});
  out.raw(header.str());
  out.u32(crc32(header.str()));
  for (const auto& p : ds.partitions) {
    Writer body;
    encode_partition(body, p);
    out.u32(static_cast<std::uint32_t>(body.str().size()));
    out.raw(body.str());
    out.u32(crc32(body.str()));
  }
  return std::move(out.str());
}

PartitionedDataset decode_snapshot(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(sizeof(kSnapshotMagic)) != std::string_view(kSnapshotMagic, sizeof(kSnapshotMagic))) {
    throw FormatError("not a LILIS1 snapshot (bad magic)");
  }
  const std::size_t header_start = r.pos();
  const std::uint16_t version = r.u16();
  if (version != kSnapshotVersion) {
    throw FormatError("unsupported snapshot version " + std::to_string(version));
  }
  PartitionedDataset ds;
  ds.total = r.u64();
  const std::uint32_t partition_count = r.u32();
  const std::uint8_t key_tag = r.u8();
  if (key_tag > 2) throw FormatError("unknown key strategy tag");
  ds.key.kind = static_cast<KeyStrategy::Kind>(key_tag);
  ds.epsilon = static_cast<int>(r.u32());
  ds.radix_bits = static_cast<int>(r.u32());
  ds.key.bits_per_dim = static_cast<int>(r.u32());
  ds.key.domain = r.rect();
  ds.global_mbr = r.rect();
  const std::uint8_t strategy_tag = r.u8();
  if (strategy_tag > 4) throw FormatError("unknown partition strategy tag");
  ds.strategy.kind = static_cast<PartitionStrategy::Kind>(strategy_tag);
  ds.strategy.a = r.u32();
  ds.strategy.b = r.u32();
  const std::size_t header_end = r.pos();
  if (r.u32() != crc32(bytes.substr(header_start, header_end - header_start))) {
    throw FormatError("snapshot header checksum mismatch");
  }
  if (partition_count == 0) throw FormatError("snapshot has no partitions");

  std::uint64_t seen = 0;
  ds.partitions.reserve(partition_count);
  for (std::uint32_t i = 0; i < partition_count; ++i) {
    const std::uint32_t length = r.u32();
    const std::string_view body = r.take(length);
    if (r.u32() != crc32(body)) {
      throw FormatError("checksum mismatch in partition block " + std::to_string(i));
    }
    Reader br(body);
    Partition p = decode_partition(br);
    if (br.remaining() != 0) throw FormatError("trailing bytes in partition block");
    if (p.descriptor.id != i) throw FormatError("partition ids out of order");
    seen += p.descriptor.count;
    ds.partitions.push_back(std::move(p));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after last partition block");
  if (seen != ds.total) throw FormatError("partition counts do not sum to the total");
  return ds;
}

void save_snapshot(const PartitionedDataset& dataset, const std::filesystem::path& path) {
  const std::string bytes = encode_snapshot(dataset);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write snapshot: " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("failed writing snapshot: " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

PartitionedDataset load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open snapshot: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_snapshot(buf.view());
}

}  // namespace lilis
