#include "fatt/store.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "fatt/errors.hpp"

namespace fatt::store {

namespace {

constexpr char kMagic[4] = {'F', 'A', 'T', 'T'};

struct Writer {
  std::vector<std::uint8_t> bytes;

  void u8(std::uint8_t v) { bytes.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes.insert(bytes.end(), p, p + n);
  }
};

struct Reader {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  void need(std::size_t n, const char* what) const {
    if (bytes.size() - pos < n)
      throw CorruptIndex(std::string("truncated index: expected ") + what, pos);
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes[pos++];
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(bytes[pos + i]) << (8 * i);
    pos += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes.data() + pos), n);
    pos += n;
    return s;
  }
};

void write_config(Writer& w, const IndexConfig& cfg) {
  const coding::CodingConfig& c = cfg.coding;
  w.u32(static_cast<std::uint32_t>(c.branching));
  w.u32(static_cast<std::uint32_t>(c.depth));
  w.u32(static_cast<std::uint32_t>(c.block_grid));
  w.u32(c.levels);
  w.u32(cfg.side);
  w.u32(static_cast<std::uint32_t>(cfg.tolerance_default));
  w.u32(static_cast<std::uint32_t>(c.selection.size()));
  for (const coding::SubbandRef& s : c.selection) {
    w.u32(s.level);
    w.u8(static_cast<std::uint8_t>(s.orientation));
  }
  w.u8(c.normalization.enabled ? 1 : 0);
  w.f64(c.normalization.scale);
  w.f64(c.normalization.range_max);
  w.u32(static_cast<std::uint32_t>(c.table.boundaries.size()));
  for (double b : c.table.boundaries) w.f64(b);
  w.u32(static_cast<std::uint32_t>(c.table.codes.size()));
  for (int code : c.table.codes) w.u32(static_cast<std::uint32_t>(code));
}

IndexConfig read_config(Reader& r) {
  IndexConfig cfg;
  coding::CodingConfig& c = cfg.coding;
  c.branching = static_cast<int>(r.u32("branching"));
  c.depth = r.u32("depth");
  c.block_grid = r.u32("block grid");
  c.levels = r.u32("levels");
  cfg.side = r.u32("side");
  cfg.tolerance_default = static_cast<int>(r.u32("tolerance"));
  const std::uint32_t selection_count = r.u32("selection count");
  if (selection_count > 4096) throw CorruptIndex("absurd selection count", r.pos);
  c.selection.clear();
  for (std::uint32_t i = 0; i < selection_count; ++i) {
    coding::SubbandRef s;
    s.level = r.u32("selection level");
    const std::uint8_t o = r.u8("selection orientation");
    if (o > 3) throw CorruptIndex("bad subband orientation", r.pos);
    s.orientation = static_cast<coding::Orientation>(o);
    c.selection.push_back(s);
  }
  c.normalization.enabled = r.u8("normalization flag") != 0;
  c.normalization.scale = r.f64("normalization scale");
  c.normalization.range_max = r.f64("normalization range");
  const std::uint32_t boundary_count = r.u32("boundary count");
  if (boundary_count > 65536) throw CorruptIndex("absurd boundary count", r.pos);
  c.table.boundaries.clear();
  for (std::uint32_t i = 0; i < boundary_count; ++i)
    c.table.boundaries.push_back(r.f64("table boundary"));
  const std::uint32_t code_count = r.u32("code count");
  if (code_count > 65537) throw CorruptIndex("absurd code count", r.pos);
  c.table.codes.clear();
  for (std::uint32_t i = 0; i < code_count; ++i)
    c.table.codes.push_back(static_cast<int>(r.u32("table code")));
  c.table.branching = c.branching;

  try {
    cfg.validate();
  } catch (const Error& e) {
    throw CorruptIndex(std::string("stored config invalid: ") + e.what(), r.pos);
  }
  return cfg;
}

}  // namespace

std::vector<std::uint8_t> serialize_index(const FattTree& tree, const IndexConfig& cfg) {
  cfg.validate();
  if (tree.config().branching != cfg.coding.branching ||
      tree.config().depth != cfg.coding.depth)
    throw InvalidArgument("serialize_index: tree shape differs from config");
  // digits are u16 on disk
  if (cfg.coding.branching > 65536)
    throw InvalidArgument("serialize_index: format supports branching up to 65536");

  const TreeReport report = tree.stats();
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u16(kFormatVersion);
  write_config(w, cfg);
  w.u64(report.node_count);
  w.u64(report.entry_count);

  tree.visit_depth_first([&](const FattNode& node, int digit) {
    w.u64(node.address());
    w.u16(static_cast<std::uint16_t>(node.level()));
    w.u16(static_cast<std::uint16_t>(digit));
    w.u32(static_cast<std::uint32_t>(node.entries().size()));
    for (const ImageEntry& e : node.entries()) {
      w.u32(static_cast<std::uint32_t>(e.id.size()));
      w.raw(e.id.data(), e.id.size());
      for (int d : e.code.digits) w.u16(static_cast<std::uint16_t>(d));
      for (double f : e.features) w.f64(f);
    }
  });
  return std::move(w.bytes);
}

std::uint64_t save_index(const FattTree& tree, const IndexConfig& cfg,
                         const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = serialize_index(tree, cfg);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("save_index: cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw DataError("save_index: short write to " + path.string());
  return bytes.size();
}

LoadResult deserialize_index(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  r.need(sizeof kMagic, "magic");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw DataError("not a FATT index (bad magic)");
  r.pos += sizeof kMagic;
  const std::uint16_t version = r.u16("version");
  if (version != kFormatVersion)
    throw DataError("unsupported FATT index version " + std::to_string(version));

  const IndexConfig cfg = read_config(r);
  const std::uint64_t node_count = r.u64("node count");
  const std::uint64_t entry_count = r.u64("entry count");

  const int branching = cfg.coding.branching;
  const std::size_t depth = cfg.coding.depth;
  const std::size_t feature_len = cfg.coding.feature_length();

  FattTree tree(cfg.tree_config());

  struct Frame {
    NodeAddress address;
    std::size_t level;
    int last_child_digit = -1;
    bool has_children = false;
  };
  std::vector<Frame> stack;
  std::vector<int> path_digits;

  auto close_frame = [&](const Frame& frame, std::size_t at) {
    // A childless root is just an empty index; any other childless interior
    // node cannot come from insertion and marks a malformed file.
    if (frame.level < depth && !frame.has_children && frame.address != 1)
      throw CorruptIndex("interior node " + std::to_string(frame.address) + " has no children",
                         at);
  };

  for (std::uint64_t i = 0; i < node_count; ++i) {
    const std::size_t record_at = r.pos;
    const NodeAddress address = r.u64("node address");
    const std::size_t level = r.u16("node level");
    const int digit = r.u16("node digit");
    const std::uint32_t node_entries = r.u32("entry count");

    if (i == 0) {
      if (address != 1 || level != 0 || digit != 0)
        throw CorruptIndex("first record is not the root", record_at);
      stack.push_back({1, 0});
    } else {
      if (level < 1 || level > depth)
        throw CorruptIndex("node level " + std::to_string(level) + " out of range", record_at);
      if (level > stack.back().level + 1)
        throw CorruptIndex("node level jumps past its parent", record_at);
      while (stack.back().level >= level) {
        close_frame(stack.back(), record_at);
        stack.pop_back();
        path_digits.pop_back();
      }
      Frame& parent = stack.back();
      if (digit >= branching) throw CorruptIndex("child digit out of range", record_at);
      if (digit <= parent.last_child_digit)
        throw CorruptIndex("children not in ascending digit order", record_at);
      parent.last_child_digit = digit;
      parent.has_children = true;
      if (address != child_index(parent.address, digit, branching))
        throw CorruptIndex("node address inconsistent with its path", record_at);
      stack.push_back({address, level});
      path_digits.push_back(digit);
    }

    if (node_entries > 0 && level != depth)
      throw CorruptIndex("interior node holds entries", record_at);
    if (node_entries == 0 && level == depth)
      throw CorruptIndex("leaf record without entries", record_at);

    for (std::uint32_t e = 0; e < node_entries; ++e) {
      const std::size_t entry_at = r.pos;
      const std::uint32_t id_len = r.u32("id length");
      if (id_len > 1 << 20) throw CorruptIndex("absurd id length", entry_at);
      ImageEntry entry;
      entry.id = r.str(id_len, "id bytes");
      entry.code.digits.reserve(depth);
      for (std::size_t d = 0; d < depth; ++d) {
        const int dig = r.u16("code digit");
        if (dig >= branching) throw CorruptIndex("entry code digit out of range", entry_at);
        entry.code.digits.push_back(dig);
      }
      if (entry.code.digits != path_digits)
        throw CorruptIndex("entry '" + entry.id + "' coded for a different leaf", entry_at);
      entry.features.reserve(feature_len);
      for (std::size_t f = 0; f < feature_len; ++f)
        entry.features.push_back(r.f64("feature value"));
      entry.source_path = entry.id;
      const InsertReport ir = tree.insert(std::move(entry));
      if (ir.replaced_existing)
        throw CorruptIndex("duplicate entry id in one leaf", entry_at);
      if (ir.leaf_address != address)
        throw CorruptIndex("entry landed on an unexpected leaf", entry_at);
    }
  }
  while (!stack.empty()) {
    close_frame(stack.back(), r.pos);
    stack.pop_back();
  }

  if (r.pos != bytes.size())
    throw CorruptIndex("trailing bytes after the last node record", r.pos);
  if (tree.entry_count() != entry_count)
    throw CorruptIndex("entry count mismatch: header says " + std::to_string(entry_count) +
                           ", body holds " + std::to_string(tree.entry_count()),
                       r.pos);
  const TreeReport report = tree.stats();
  if (report.node_count != node_count)
    throw CorruptIndex("node count mismatch: header says " + std::to_string(node_count) +
                           ", body builds " + std::to_string(report.node_count),
                       r.pos);
  try {
    tree.audit();
  } catch (const Error& e) {
    throw CorruptIndex(std::string("index failed audit: ") + e.what(), r.pos);
  }
  return {std::move(tree), cfg};
}

LoadResult load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_index: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_index(bytes);
}

}  // namespace fatt::store
