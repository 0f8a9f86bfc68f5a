#pragma once

// Binary tensor formats. All integers are little-endian uint32, all payload
// values little-endian IEEE-754.
//
//   UQB1  "UQB1" M N C kind:u8  then M*N*C float32, member-major, then
//         sample, then class. kind 0 = probabilities, 1 = Beta params
//         (member 0 alpha, member 1 beta), 2 = het logits (member 0 mu,
//         member 1 sigma).
//   UQL1  "UQL1" N C            then N*C int8 in {-1, 0, 1}.
//   UQF1  "UQF1" N D            then N*D float32.
//   UQS1  "UQS1" N C shape:u8 kind:u8  then N*C float64. shape 0 = per
//         class, 1 = per sample (C = 1).
//
// Writers narrow doubles to float32 where the format says so; values that
// are already float-representable round-trip bit for bit.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "uqbench/ddu.hpp"
#include "uqbench/edl.hpp"
#include "uqbench/hetnn.hpp"
#include "uqbench/tensor.hpp"

namespace uqbench::io {

enum class PayloadKind : std::uint8_t { kProbabilities = 0, kBetaParams = 1, kHetLogits = 2 };

enum class FormatErrorKind { kIo, kBadMagic, kTruncated, kHeader, kDomain, kTrailingBytes };

std::string_view FormatErrorKindName(FormatErrorKind kind);

class FormatError : public std::runtime_error {
 public:
  FormatError(FormatErrorKind kind, std::size_t offset, const std::string& what);
  FormatErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  FormatErrorKind kind_;
  std::size_t offset_;
};

inline constexpr std::size_t kUqb1HeaderBytes = 17;
inline constexpr std::size_t kUql1HeaderBytes = 12;
inline constexpr std::size_t kUqf1HeaderBytes = 12;
inline constexpr std::size_t kUqs1HeaderBytes = 14;

using Uqb1Payload = std::variant<PredictionTensor, edl::BetaParams, hetnn::HetLogits>;

std::vector<std::uint8_t> EncodeUqb1(const PredictionTensor& preds);
std::vector<std::uint8_t> EncodeUqb1(const edl::BetaParams& params);
std::vector<std::uint8_t> EncodeUqb1(const hetnn::HetLogits& logits);
Uqb1Payload DecodeUqb1(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> EncodeUql1(const LabelTensor& labels);
LabelTensor DecodeUql1(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> EncodeUqf1(const ddu::FeatureMatrix& features);
ddu::FeatureMatrix DecodeUqf1(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> EncodeUqs1(const UncertaintyScores& scores);
UncertaintyScores DecodeUqs1(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

Uqb1Payload ReadUqb1(const std::filesystem::path& path);
// Typed readers; throw FormatError(kHeader) when the payload kind differs.
PredictionTensor ReadPredictions(const std::filesystem::path& path);
edl::BetaParams ReadBetaParams(const std::filesystem::path& path);
hetnn::HetLogits ReadHetLogits(const std::filesystem::path& path);

// Text alternative for small tensors: first line "M N C", then M*N lines of
// C comma-separated probabilities (member-major).
PredictionTensor ReadPredictionsCsv(const std::filesystem::path& path);

LabelTensor ReadLabels(const std::filesystem::path& path);
ddu::FeatureMatrix ReadFeatures(const std::filesystem::path& path);
UncertaintyScores ReadScores(const std::filesystem::path& path);

template <typename T>
void WriteUqb1(const std::filesystem::path& path, const T& payload) {
  WriteFileBytes(path, EncodeUqb1(payload));
}
void WriteLabels(const std::filesystem::path& path, const LabelTensor& labels);
void WriteFeatures(const std::filesystem::path& path, const ddu::FeatureMatrix& features);
void WriteScores(const std::filesystem::path& path, const UncertaintyScores& scores);

// Single-class label file (C = 1) as used for OOD flags.
std::vector<std::int8_t> ReadOodLabels(const std::filesystem::path& path);
void WriteOodLabels(const std::filesystem::path& path, std::span<const std::int8_t> ood);

}  // namespace uqbench::io
