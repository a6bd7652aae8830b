#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lobbylink/error.hpp"
#include "lobbylink/vectors.hpp"

namespace lobbylink::vectors {
namespace {

constexpr const char* kMagic = "#lobbylink-vectors v1";

void put_u64_le(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint64_t get_u64_le(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw Error(ErrorKind::parse, "vector store: truncated binary block");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_store(const std::filesystem::path& path, const VectorIndex& index, const std::string& provider_tag,
                StoreFormat format) {
  if (provider_tag.find_first_of(" \t\n") != std::string::npos)
    throw Error(ErrorKind::invalid_argument, "provider tag must not contain whitespace");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << kMagic << '\n'
      << "dim=" << index.dim() << " count=" << index.size() << " provider=" << provider_tag
      << " format=" << (format == StoreFormat::text ? "text" : "binary") << '\n';
  char buf[32];
  for (std::size_t r = 0; r < index.size(); ++r) {
    const auto row = index.row_span(r);
    if (format == StoreFormat::text) {
      out << index.id(r) << '\t' << (index.truncated(r) ? 'T' : '-') << '\t';
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", row[i]);
        if (i) out << ' ';
        out << buf;
      }
      out << '\n';
    } else {
      put_u64_le(out, index.id(r).size());
      out.write(index.id(r).data(), static_cast<std::streamsize>(index.id(r).size()));
      out.put(index.truncated(r) ? 1 : 0);
      for (double v : row) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        put_u64_le(out, bits);
      }
    }
  }
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

VectorStore load_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw Error(ErrorKind::parse, path.string() + ": not a vector store");
  if (!std::getline(in, line)) throw Error(ErrorKind::parse, path.string() + ": missing header");
  std::size_t dim = 0, count = 0;
  char tag[512] = {0}, fmt[16] = {0};
  if (std::sscanf(line.c_str(), "dim=%zu count=%zu provider=%511s format=%15s", &dim, &count, tag, fmt) != 4)
    throw Error(ErrorKind::parse, path.string() + ": malformed header");
  VectorStore store{tag, VectorIndex(dim)};
  const bool text = std::strcmp(fmt, "text") == 0;
  if (!text && std::strcmp(fmt, "binary") != 0) throw Error(ErrorKind::parse, path.string() + ": unknown format");
  for (std::size_t r = 0; r < count; ++r) {
    std::string id;
    bool truncated = false;
    std::vector<double> values(dim);
    if (text) {
      if (!std::getline(in, line))
        throw Error(ErrorKind::parse, path.string() + ": expected " + std::to_string(count) + " rows");
      const auto t1 = line.find('\t');
      const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
      if (t2 == std::string::npos) throw Error(ErrorKind::parse, path.string() + ": malformed row " + std::to_string(r + 1));
      id = line.substr(0, t1);
      truncated = line[t1 + 1] == 'T';
      const char* p = line.c_str() + t2 + 1;
      for (std::size_t i = 0; i < dim; ++i) {
        char* end = nullptr;
        values[i] = std::strtod(p, &end);
        if (end == p) throw Error(ErrorKind::parse, path.string() + ": row '" + id + "' has too few values");
        p = end;
      }
    } else {
      const std::uint64_t len = get_u64_le(in);
      if (len > (1u << 20)) throw Error(ErrorKind::parse, path.string() + ": implausible id length");
      id.resize(len);
      if (!in.read(id.data(), static_cast<std::streamsize>(len))) throw Error(ErrorKind::parse, "truncated id");
      truncated = in.get() == 1;
      for (auto& v : values) {
        const std::uint64_t bits = get_u64_le(in);
        std::memcpy(&v, &bits, sizeof v);
      }
    }
    store.index.add(std::move(id), Embedding::from_unit(std::move(values)), truncated);
  }
  return store;
}

}  // namespace lobbylink::vectors
