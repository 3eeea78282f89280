#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace af {

constexpr int kMaxVars = 5;

// Fixed-capacity storage: no heap traffic inside the face kernels.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxVars, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxVars, kMaxVars>;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

enum class Exec { serial, omp };

}  // namespace af
