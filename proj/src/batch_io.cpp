#include "silentflow/batch_io.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <iterator>

namespace silentflow {
namespace {

class Writer {
 public:
  explicit Writer(std::size_t reserve) { out_.reserve(reserve); }

  template <class T>
  void put(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i)));
    }
  }
  void put_block(const Block128& b) {
    const auto bytes = b.to_bytes();
    out_.insert(out_.end(), bytes.begin(), bytes.end());
  }
  void put_raw(const std::vector<std::uint8_t>& raw) { out_.insert(out_.end(), raw.begin(), raw.end()); }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  Block128 get_block() {
    need(16);
    std::array<std::uint8_t, 16> raw;
    std::memcpy(raw.data(), bytes_.data() + pos_, 16);
    pos_ += 16;
    return Block128::from_bytes(raw);
  }
  std::vector<std::uint8_t> get_raw(std::size_t count) {
    need(count);
    std::vector<std::uint8_t> out(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                  bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + count));
    pos_ += count;
    return out;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t count) const {
    if (bytes_.size() - pos_ < count) throw ParseError("batch file truncated");
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

void put_header(Writer& w, const CotParams& p, Party role) {
  if (p.k > UINT32_MAX || p.n > UINT32_MAX || p.t > UINT32_MAX || p.h > 255 || p.d > 255 ||
      p.lambda > 255) {
    throw std::invalid_argument("serialize: parameters exceed the header field widths");
  }
  for (char c : kBatchMagic) w.put(static_cast<std::uint8_t>(c));
  w.put(kBatchVersion);
  w.put(static_cast<std::uint8_t>(role));
  w.put(static_cast<std::uint32_t>(p.k));
  w.put(static_cast<std::uint32_t>(p.n));
  w.put(static_cast<std::uint32_t>(p.t));
  w.put(static_cast<std::uint8_t>(p.h));
  w.put(static_cast<std::uint8_t>(p.d));
  w.put(static_cast<std::uint8_t>(p.lambda));
}

BatchHeader get_header(Reader& r) {
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.get<std::uint8_t>());
  if (std::memcmp(magic, kBatchMagic, 4) != 0) throw ParseError("bad magic, not a batch file");
  BatchHeader h;
  h.version = r.get<std::uint16_t>();
  if (h.version != kBatchVersion) throw ParseError("unsupported batch version " + std::to_string(h.version));
  const auto role = r.get<std::uint8_t>();
  if (role > 1) throw ParseError("bad role byte " + std::to_string(role));
  h.role = static_cast<Party>(role);
  h.k = r.get<std::uint32_t>();
  h.n = r.get<std::uint32_t>();
  h.t = r.get<std::uint32_t>();
  h.h = r.get<std::uint8_t>();
  h.d = r.get<std::uint8_t>();
  h.lambda = r.get<std::uint8_t>();
  return h;
}

CotParams params_from(const BatchHeader& h, Party expected) {
  if (h.role != expected) {
    throw ParseError(std::string("expected a ") + (expected == Party::kSender ? "sender" : "receiver") +
                     " batch");
  }
  CotParams p;
  p.k = h.k;
  p.n = h.n;
  p.t = h.t;
  p.h = h.h;
  p.d = h.d;
  p.lambda = h.lambda;
  p.s_block = std::min<std::uint32_t>(p.s_block, std::max<std::uint32_t>(p.h, 1));
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("header carries invalid parameters: ") + e.what());
  }
  return p;
}

}  // namespace

std::vector<std::uint8_t> serialize(const SenderView& view) {
  if (view.K.size() != view.params.n) throw std::invalid_argument("serialize: |K| must equal n");
  Writer w(kBatchHeaderSize + 16 * (view.K.size() + 1));
  put_header(w, view.params, Party::kSender);
  w.put_block(view.delta);
  for (const auto& b : view.K) w.put_block(b);
  return w.take();
}

std::vector<std::uint8_t> serialize(const ReceiverView& view) {
  if (view.M.size() != view.params.n || view.y.size() != view.params.n) {
    throw std::invalid_argument("serialize: |y| and |M| must equal n");
  }
  Writer w(kBatchHeaderSize + (view.y.size() + 7) / 8 + 16 * view.M.size());
  put_header(w, view.params, Party::kReceiver);
  w.put_raw(view.y.to_packed());
  for (const auto& b : view.M) w.put_block(b);
  return w.take();
}

BatchHeader parse_header(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  return get_header(r);
}

SenderView parse_sender(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  SenderView view;
  view.params = params_from(get_header(r), Party::kSender);
  if (r.remaining() != 16 * (view.params.n + 1)) throw ParseError("sender payload has the wrong length");
  view.delta = r.get_block();
  view.K.resize(view.params.n);
  for (auto& b : view.K) b = r.get_block();
  return view;
}

ReceiverView parse_receiver(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  ReceiverView view;
  view.params = params_from(get_header(r), Party::kReceiver);
  const std::size_t packed = (view.params.n + 7) / 8;
  if (r.remaining() != packed + 16 * view.params.n) throw ParseError("receiver payload has the wrong length");
  const std::vector<std::uint8_t> y_bytes = r.get_raw(packed);
  if (view.params.n % 8 != 0 && (y_bytes.back() >> (view.params.n % 8)) != 0) {
    throw ParseError("receiver choice bits have nonzero padding");
  }
  view.y = BitVec::from_packed(y_bytes, view.params.n);
  view.M.resize(view.params.n);
  for (auto& b : view.M) b = r.get_block();
  return view;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace silentflow
