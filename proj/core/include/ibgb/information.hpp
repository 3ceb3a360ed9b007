#pragma once

// Exact information quantities on finite alphabets.

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace ibgb {

inline constexpr double kLn2 = 0.69314718055994530942;

enum class LogBase { nats, bits };

inline double in_base(double nats, LogBase base) { return base == LogBase::bits ? nats / kLn2 : nats; }

/// Shannon entropy of a probability vector; zero entries contribute nothing.
double entropy(std::span<const double> pmf, LogBase base = LogBase::nats);
double entropy(const Eigen::VectorXd& pmf, LogBase base = LogBase::nats);

/// I(A;B) for a joint table P(a, b) (rows a, columns b).
double mutual_information(const Eigen::MatrixXd& joint, LogBase base = LogBase::nats);

/// H(B | A) for a joint table P(a, b).
double conditional_entropy(const Eigen::MatrixXd& joint, LogBase base = LogBase::nats);

/// I(A;B | C) given one joint slice P(a, b, C=c) per value c. Slices carry
/// the mass of c, so they sum to one together.
double conditional_mutual_information(std::span<const Eigen::MatrixXd> slices,
                                      LogBase base = LogBase::nats);

/// Plug-in entropy of the empirical distribution of integer symbols.
double empirical_entropy(std::span<const long long> symbols, LogBase base = LogBase::nats);

}  // namespace ibgb
