#include "uqbench/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace uqbench::io {

namespace {

constexpr char kUqb1Magic[4] = {'U', 'Q', 'B', '1'};
constexpr char kUql1Magic[4] = {'U', 'Q', 'L', '1'};
constexpr char kUqf1Magic[4] = {'U', 'Q', 'F', '1'};
constexpr char kUqs1Magic[4] = {'U', 'Q', 'S', '1'};

class Writer {
 public:
  explicit Writer(std::size_t reserve) { bytes_.reserve(reserve); }

  void Magic(const char (&magic)[4]) { bytes_.insert(bytes_.end(), magic, magic + 4); }
  void U8(std::uint8_t v) { bytes_.push_back(v); }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void F32(double v) { U32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }

  std::vector<std::uint8_t> Take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, const char* format)
      : bytes_(bytes), format_(format) {}

  void Magic(const char (&magic)[4]) {
    Need(4, "magic");
    if (std::memcmp(bytes_.data(), magic, 4) != 0) {
      throw FormatError(FormatErrorKind::kBadMagic, 0,
                        std::string(format_) + ": bad magic, expected \"" +
                            std::string(magic, 4) + "\"");
    }
    offset_ = 4;
  }
  std::uint8_t U8(const char* what) {
    Need(1, what);
    return bytes_[offset_++];
  }
  std::uint32_t U32(const char* what) {
    Need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[offset_ + i]) << (8 * i);
    offset_ += 4;
    return v;
  }
  std::uint64_t U64(const char* what) {
    Need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[offset_ + i]) << (8 * i);
    offset_ += 8;
    return v;
  }
  double F32(const char* what) { return std::bit_cast<float>(U32(what)); }
  double F64(const char* what) { return std::bit_cast<double>(U64(what)); }

  // Checks the payload length up front so truncation is reported at the
  // header rather than half way through decoding.
  void ExpectRemaining(std::size_t payload_bytes) const {
    const std::size_t remaining = bytes_.size() - offset_;
    if (remaining < payload_bytes) {
      throw FormatError(FormatErrorKind::kTruncated, bytes_.size(),
                        std::string(format_) + ": truncated payload, expected " +
                            std::to_string(payload_bytes) + " bytes after offset " +
                            std::to_string(offset_) + ", found " + std::to_string(remaining));
    }
    if (remaining > payload_bytes) {
      throw FormatError(FormatErrorKind::kTrailingBytes, offset_ + payload_bytes,
                        std::string(format_) + ": " + std::to_string(remaining - payload_bytes) +
                            " unexpected trailing bytes");
    }
  }

  std::size_t offset() const { return offset_; }
  const char* format() const { return format_; }

 private:
  void Need(std::size_t n, const char* what) const {
    if (bytes_.size() - offset_ < n) {
      throw FormatError(FormatErrorKind::kTruncated, offset_,
                        std::string(format_) + ": truncated while reading " + what);
    }
  }

  std::span<const std::uint8_t> bytes_;
  const char* format_;
  std::size_t offset_ = 0;
};

std::uint32_t Dim(std::size_t v, const char* what) {
  if (v == 0 || v > 0xffffffffULL) {
    throw std::invalid_argument(std::string("cannot encode ") + what + " = " + std::to_string(v));
  }
  return static_cast<std::uint32_t>(v);
}

std::size_t CheckedProduct(std::initializer_list<std::uint32_t> dims, std::size_t width,
                           const Reader& reader) {
  std::size_t total = width;
  for (std::uint32_t d : dims) {
    if (d == 0) {
      throw FormatError(FormatErrorKind::kHeader, reader.offset(),
                        std::string(reader.format()) + ": zero dimension in header");
    }
    if (total > (std::size_t{1} << 62) / d) {
      throw FormatError(FormatErrorKind::kHeader, reader.offset(),
                        std::string(reader.format()) + ": header dimensions overflow");
    }
    total *= d;
  }
  return total;
}

[[noreturn]] void DomainError(const Reader& reader, std::size_t index, std::size_t offset,
                              const std::string& what) {
  throw FormatError(FormatErrorKind::kDomain, offset,
                    std::string(reader.format()) + ": " + what + " at value index " +
                        std::to_string(index) + " (byte offset " + std::to_string(offset) + ")");
}

std::vector<std::uint8_t> EncodeTwoMember(const Matrix& first, const Matrix& second,
                                          PayloadKind kind) {
  Writer w(kUqb1HeaderBytes + 8 * first.size());
  w.Magic(kUqb1Magic);
  w.U32(2);
  w.U32(Dim(first.rows(), "N"));
  w.U32(Dim(first.cols(), "C"));
  w.U8(static_cast<std::uint8_t>(kind));
  for (double v : first.values()) w.F32(v);
  for (double v : second.values()) w.F32(v);
  return w.Take();
}

}  // namespace

std::string_view FormatErrorKindName(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::kIo: return "io";
    case FormatErrorKind::kBadMagic: return "bad_magic";
    case FormatErrorKind::kTruncated: return "truncated";
    case FormatErrorKind::kHeader: return "header";
    case FormatErrorKind::kDomain: return "domain";
    case FormatErrorKind::kTrailingBytes: return "trailing_bytes";
  }
  return "io";
}

FormatError::FormatError(FormatErrorKind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(what), kind_(kind), offset_(offset) {}

std::vector<std::uint8_t> EncodeUqb1(const PredictionTensor& preds) {
  Writer w(kUqb1HeaderBytes + 4 * preds.values().size());
  w.Magic(kUqb1Magic);
  w.U32(Dim(preds.members(), "M"));
  w.U32(Dim(preds.samples(), "N"));
  w.U32(Dim(preds.classes(), "C"));
  w.U8(static_cast<std::uint8_t>(PayloadKind::kProbabilities));
  for (double v : preds.values()) w.F32(v);
  return w.Take();
}

std::vector<std::uint8_t> EncodeUqb1(const edl::BetaParams& params) {
  return EncodeTwoMember(params.alpha(), params.beta(), PayloadKind::kBetaParams);
}

std::vector<std::uint8_t> EncodeUqb1(const hetnn::HetLogits& logits) {
  return EncodeTwoMember(logits.mu(), logits.sigma(), PayloadKind::kHetLogits);
}

Uqb1Payload DecodeUqb1(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, "UQB1");
  r.Magic(kUqb1Magic);
  const std::uint32_t m = r.U32("M");
  const std::uint32_t n = r.U32("N");
  const std::uint32_t c = r.U32("C");
  const std::uint8_t kind_byte = r.U8("payload kind");
  if (kind_byte > static_cast<std::uint8_t>(PayloadKind::kHetLogits)) {
    throw FormatError(FormatErrorKind::kHeader, 16,
                      "UQB1: unknown payload kind " + std::to_string(kind_byte));
  }
  const auto kind = static_cast<PayloadKind>(kind_byte);
  const std::size_t count = CheckedProduct({m, n, c}, 1, r);
  if (kind != PayloadKind::kProbabilities && m != 2) {
    throw FormatError(FormatErrorKind::kHeader, 4,
                      "UQB1: parameter payloads require M = 2, header has M = " + std::to_string(m));
  }
  r.ExpectRemaining(4 * count);

  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t offset = r.offset();
    const double v = r.F32("payload");
    if (!std::isfinite(v)) DomainError(r, i, offset, "non-finite value");
    switch (kind) {
      case PayloadKind::kProbabilities:
        if (v < 0.0 || v > 1.0) DomainError(r, i, offset, "probability outside [0,1]");
        break;
      case PayloadKind::kBetaParams:
        if (!(v > 0.0)) DomainError(r, i, offset, "Beta parameter must be > 0");
        break;
      case PayloadKind::kHetLogits:
        if (i >= count / 2 && v < 0.0) DomainError(r, i, offset, "negative logit std");
        break;
    }
    values[i] = v;
  }

  if (kind == PayloadKind::kProbabilities) {
    return PredictionTensor(m, n, c, std::move(values));
  }
  const std::size_t half = count / 2;
  Matrix first(n, c, std::vector<double>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(half)));
  Matrix second(n, c, std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(half), values.end()));
  if (kind == PayloadKind::kBetaParams) return edl::BetaParams(std::move(first), std::move(second));
  return hetnn::HetLogits(std::move(first), std::move(second));
}

std::vector<std::uint8_t> EncodeUql1(const LabelTensor& labels) {
  Writer w(kUql1HeaderBytes + labels.values().size());
  w.Magic(kUql1Magic);
  w.U32(Dim(labels.samples(), "N"));
  w.U32(Dim(labels.classes(), "C"));
  for (std::int8_t v : labels.values()) w.U8(static_cast<std::uint8_t>(v));
  return w.Take();
}

LabelTensor DecodeUql1(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, "UQL1");
  r.Magic(kUql1Magic);
  const std::uint32_t n = r.U32("N");
  const std::uint32_t c = r.U32("C");
  const std::size_t count = CheckedProduct({n, c}, 1, r);
  r.ExpectRemaining(count);
  std::vector<std::int8_t> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t offset = r.offset();
    const auto v = static_cast<std::int8_t>(r.U8("labels"));
    if (v < -1 || v > 1) DomainError(r, i, offset, "label outside {-1,0,1}");
    values[i] = v;
  }
  return LabelTensor(n, c, std::move(values));
}

std::vector<std::uint8_t> EncodeUqf1(const ddu::FeatureMatrix& features) {
  Writer w(kUqf1HeaderBytes + 4 * features.values().size());
  w.Magic(kUqf1Magic);
  w.U32(Dim(features.samples(), "N"));
  w.U32(Dim(features.dims(), "D"));
  for (double v : features.values().values()) w.F32(v);
  return w.Take();
}

ddu::FeatureMatrix DecodeUqf1(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, "UQF1");
  r.Magic(kUqf1Magic);
  const std::uint32_t n = r.U32("N");
  const std::uint32_t d = r.U32("D");
  const std::size_t count = CheckedProduct({n, d}, 1, r);
  r.ExpectRemaining(4 * count);
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t offset = r.offset();
    const double v = r.F32("features");
    if (!std::isfinite(v)) DomainError(r, i, offset, "non-finite feature");
    values[i] = v;
  }
  return ddu::FeatureMatrix(Matrix(n, d, std::move(values)));
}

std::vector<std::uint8_t> EncodeUqs1(const UncertaintyScores& scores) {
  Writer w(kUqs1HeaderBytes + 8 * scores.values.size());
  w.Magic(kUqs1Magic);
  w.U32(Dim(scores.values.rows(), "N"));
  w.U32(Dim(scores.values.cols(), "C"));
  w.U8(static_cast<std::uint8_t>(scores.shape));
  w.U8(static_cast<std::uint8_t>(scores.kind));
  for (double v : scores.values.values()) w.F64(v);
  return w.Take();
}

UncertaintyScores DecodeUqs1(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, "UQS1");
  r.Magic(kUqs1Magic);
  const std::uint32_t n = r.U32("N");
  const std::uint32_t c = r.U32("C");
  const std::uint8_t shape = r.U8("shape");
  const std::uint8_t kind = r.U8("kind");
  if (shape > 1) throw FormatError(FormatErrorKind::kHeader, 12, "UQS1: unknown shape byte");
  if (kind > static_cast<std::uint8_t>(ScoreKind::kExternal)) {
    throw FormatError(FormatErrorKind::kHeader, 13, "UQS1: unknown score kind byte");
  }
  if (shape == 1 && c != 1) {
    throw FormatError(FormatErrorKind::kHeader, 8, "UQS1: per-sample scores require C = 1");
  }
  const std::size_t count = CheckedProduct({n, c}, 1, r);
  r.ExpectRemaining(8 * count);
  std::vector<double> values(count);
  // NaN marks invalid cells (e.g. unfitted DDU classes); infinities are rejected.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t offset = r.offset();
    const double v = r.F64("scores");
    if (std::isinf(v)) DomainError(r, i, offset, "infinite score");
    values[i] = v;
  }
  return {static_cast<ScoreKind>(kind), static_cast<ScoreShape>(shape),
          Matrix(n, c, std::move(values))};
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorKind::kIo, 0, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw FormatError(FormatErrorKind::kIo, 0, "read failed for " + path.string());
  return bytes;
}

void WriteFileBytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatErrorKind::kIo, 0, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatErrorKind::kIo, 0, "write failed for " + path.string());
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  WriteFileBytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

namespace {

template <typename Decoded>
Decoded WithPath(const std::filesystem::path& path, Decoded (*decode)(std::span<const std::uint8_t>)) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  try {
    return decode(bytes);
  } catch (const FormatError& e) {
    throw FormatError(e.kind(), e.offset(), path.string() + ": " + e.what());
  }
}

template <typename T>
T ExpectKind(Uqb1Payload payload, const std::filesystem::path& path, const char* expected) {
  if (auto* typed = std::get_if<T>(&payload)) return std::move(*typed);
  throw FormatError(FormatErrorKind::kHeader, 16,
                    path.string() + ": UQB1 payload kind is not " + expected);
}

}  // namespace

Uqb1Payload ReadUqb1(const std::filesystem::path& path) { return WithPath(path, &DecodeUqb1); }

PredictionTensor ReadPredictions(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return ReadPredictionsCsv(path);
  return ExpectKind<PredictionTensor>(ReadUqb1(path), path, "probabilities");
}

edl::BetaParams ReadBetaParams(const std::filesystem::path& path) {
  return ExpectKind<edl::BetaParams>(ReadUqb1(path), path, "beta-params");
}

hetnn::HetLogits ReadHetLogits(const std::filesystem::path& path) {
  return ExpectKind<hetnn::HetLogits>(ReadUqb1(path), path, "het-logits");
}

PredictionTensor ReadPredictionsCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatErrorKind::kIo, 0, "cannot open " + path.string());
  std::string line;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t c = 0;
  if (!std::getline(in, line) || !(std::istringstream(line) >> m >> n >> c) || m == 0 || n == 0 ||
      c == 0) {
    throw FormatError(FormatErrorKind::kHeader, 0, path.string() + ": expected header \"M N C\"");
  }
  std::vector<double> values;
  values.reserve(m * n * c);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || !std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw FormatError(FormatErrorKind::kDomain, row,
                          path.string() + ": invalid probability '" + cell + "' on data row " +
                              std::to_string(row));
      }
      values.push_back(v);
      ++count;
    }
    if (count != c) {
      throw FormatError(FormatErrorKind::kHeader, row,
                        path.string() + ": data row " + std::to_string(row) + " has " +
                            std::to_string(count) + " values, expected " + std::to_string(c));
    }
    ++row;
  }
  if (row != m * n) {
    throw FormatError(FormatErrorKind::kTruncated, row,
                      path.string() + ": expected " + std::to_string(m * n) + " data rows, found " +
                          std::to_string(row));
  }
  return PredictionTensor(m, n, c, std::move(values));
}

LabelTensor ReadLabels(const std::filesystem::path& path) { return WithPath(path, &DecodeUql1); }

ddu::FeatureMatrix ReadFeatures(const std::filesystem::path& path) {
  return WithPath(path, &DecodeUqf1);
}

UncertaintyScores ReadScores(const std::filesystem::path& path) {
  return WithPath(path, &DecodeUqs1);
}

void WriteLabels(const std::filesystem::path& path, const LabelTensor& labels) {
  WriteFileBytes(path, EncodeUql1(labels));
}

void WriteFeatures(const std::filesystem::path& path, const ddu::FeatureMatrix& features) {
  WriteFileBytes(path, EncodeUqf1(features));
}

void WriteScores(const std::filesystem::path& path, const UncertaintyScores& scores) {
  WriteFileBytes(path, EncodeUqs1(scores));
}

std::vector<std::int8_t> ReadOodLabels(const std::filesystem::path& path) {
  const LabelTensor labels = ReadLabels(path);
  if (labels.classes() != 1) {
    throw FormatError(FormatErrorKind::kHeader, 8,
                      path.string() + ": OOD label file must have C = 1");
  }
  for (std::size_t i = 0; i < labels.samples(); ++i) {
    if (labels(i, 0) < 0) {
      throw FormatError(FormatErrorKind::kDomain, kUql1HeaderBytes + i,
                        path.string() + ": OOD labels must be 0 or 1 (value index " +
                            std::to_string(i) + ")");
    }
  }
  return {labels.values().begin(), labels.values().end()};
}

void WriteOodLabels(const std::filesystem::path& path, std::span<const std::int8_t> ood) {
  WriteLabels(path, LabelTensor(ood.size(), 1, std::vector<std::int8_t>(ood.begin(), ood.end())));
}

}  // namespace uqbench::io
