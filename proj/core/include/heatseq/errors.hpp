#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace heatseq {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

class EmptySeriesError : public Error {
 public:
  using Error::Error;
};

class DegenerateChannelError : public Error {
 public:
  explicit DegenerateChannelError(std::string channel)
      : Error("degenerate channel '" + channel + "': x_max == x_min on the training partition"),
        channel_(std::move(channel)) {}
  const std::string& channel() const { return channel_; }

 private:
  std::string channel_;
};

class LabelingError : public Error {
 public:
  explicit LabelingError(std::string channel)
      : Error("labeling requires channel '" + channel + "' which the window does not carry"),
        channel_(std::move(channel)) {}
  const std::string& channel() const { return channel_; }

 private:
  std::string channel_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class NonFiniteGradientError : public Error {
 public:
  NonFiniteGradientError(std::string parameter, std::size_t index)
      : Error("non-finite gradient in '" + parameter + "' at index " + std::to_string(index)),
        parameter_(std::move(parameter)),
        index_(index) {}
  const std::string& parameter() const { return parameter_; }
  std::size_t index() const { return index_; }

 private:
  std::string parameter_;
  std::size_t index_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": parse error: " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace heatseq
