#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace vf {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matf = Mat<float>;
using Matd = Mat<double>;
using Vecf = Vec<float>;
using Vecd = Vec<double>;

// Batch of 1D feature sequences. Each entry is channels x time; lengths may
// differ across the batch.
template <typename Scalar>
using SeqBatch = std::vector<Mat<Scalar>>;

// Batch of 2D feature maps. Each map is channels x (height*width) with the
// column index laid out as y*width + x.
template <typename Scalar>
struct PlaneBatch {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<Mat<Scalar>> maps;

  int size() const { return static_cast<int>(maps.size()); }
  int spatial() const { return height * width; }

  static PlaneBatch zeros(int n, int c, int h, int w) {
    PlaneBatch b;
    b.channels = c;
    b.height = h;
    b.width = w;
    b.maps.assign(static_cast<size_t>(n), Mat<Scalar>::Zero(c, h * w));
    return b;
  }
};

using PlaneBatchf = PlaneBatch<float>;

// One face image: 3 x (height*width), values in [-1, 1].
template <typename Scalar>
struct FaceImage {
  int height = 0;
  int width = 0;
  Mat<Scalar> pixels;  // 3 x (height*width)
};

using FaceImagef = FaceImage<float>;

// Error taxonomy. Every failure carries a stable code (used in tests and CLI
// messages) and the process exit code its category maps to.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg, int exit_code)
      : std::runtime_error(code + ": " + msg),
        code_(std::move(code)),
        exit_code_(exit_code) {}

  const std::string& code() const { return code_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string code_;
  int exit_code_;
};

// exit code 2
struct ConfigError : Error {
  ConfigError(std::string code, const std::string& msg)
      : Error(std::move(code), msg, 2) {}
};

// exit code 3
struct DataError : Error {
  DataError(std::string code, const std::string& msg)
      : Error(std::move(code), msg, 3) {}
};

// exit code 4
struct DivergenceError : Error {
  explicit DivergenceError(const std::string& msg)
      : Error("DivergenceDetected", msg, 4) {}
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& msg, std::string code = "ShapeMismatch")
      : Error(std::move(code), msg, 3) {}
};

inline void require(bool ok, const std::string& code, const std::string& msg,
                    int exit_code = 3) {
  if (!ok) throw Error(code, msg, exit_code);
}

}  // namespace vf
