#pragma once

#include <stdexcept>
#include <string>

namespace pgr {

enum class Err {
  Usage,
  MissingDependency,
  ContactOffObject,
  ZeroDisplacement,
  ObjectOccluded,
  NoObjectPoints,
  SchemaMismatch,
  CorruptFile,
  CorruptShard,
  MissingManifest,
  EmptyDataset,
  NoPositiveSamples,
  QuotaInfeasible,
  InvalidConfig,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace pgr
