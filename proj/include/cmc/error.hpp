#pragma once

#include <stdexcept>
#include <string>

namespace cmc {

// Base for every error raised by the library. The message names the offending
// input; the pipeline prefixes it with the stage that failed.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmc
