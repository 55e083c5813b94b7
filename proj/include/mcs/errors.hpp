#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Zero spatial length where a direction or projection base is required.
class DegenerateSegmentError : public Error {
 public:
  using Error::Error;
};

// Non-positive time delta or otherwise unusable segment.
class InvalidSegmentError : public Error {
 public:
  using Error::Error;
};

// Latitude/longitude outside the valid geographic range, or non-finite input.
class InvalidCoordinateError : public Error {
 public:
  using Error::Error;
};

class MalformedTrajectoryError : public Error {
 public:
  MalformedTrajectoryError(std::string sensor_id, std::size_t point_index)
      : Error("trajectory " + sensor_id +
              ": timestamps not strictly increasing at point " +
              std::to_string(point_index)),
        sensor_id_(std::move(sensor_id)),
        point_index_(point_index) {}

  const std::string& sensor_id() const { return sensor_id_; }
  std::size_t point_index() const { return point_index_; }

 private:
  std::string sensor_id_;
  std::size_t point_index_;
};

class EmptyClusterError : public Error {
 public:
  using Error::Error;
};

// No cluster center available where an estimate is required.
class NoEstimateError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mcs
