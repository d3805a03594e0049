// Copyright (c) 2026 The passfl authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PASSFL_ERRORS_HPP
#define PASSFL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace passfl {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A requested operation has no feasible solution for the given inputs
/// (empty schedule, computation SNR below one, waveguide too short, ...).
class infeasible_error : public error {
 public:
  explicit infeasible_error(const std::string& msg) : error(msg) {}
};

/// Malformed configuration file or schema violation; the message names the
/// offending key.
class schema_error : public error {
 public:
  explicit schema_error(const std::string& msg) : error(msg) {}
};

/// Malformed IDX dataset file.
class idx_error : public error {
 public:
  enum class kind { wrong_magic, truncated, count_mismatch };

  idx_error(kind k, const std::string& msg) : error(msg), kind_(k) {}
  kind which() const { return kind_; }

 private:
  kind kind_;
};

}  // namespace passfl

#endif  // PASSFL_ERRORS_HPP
