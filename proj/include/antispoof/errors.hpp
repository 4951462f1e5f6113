#pragma once

#include <stdexcept>
#include <string>

namespace antispoof {

// Base class for every failure this library raises. Tools can catch Error
// once and turn it into a nonzero exit status.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// audio decoding
struct MalformedWav : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };

// dataset handling
struct BadLabel : Error { using Error::Error; };
struct EmptyManifest : Error { using Error::Error; };
struct FileError : Error { using Error::Error; };
struct AllRowsDropped : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct SchemaMismatch : Error { using Error::Error; };
struct DegenerateSplit : Error { using Error::Error; };

// model training and persistence
struct SingleClass : Error { using Error::Error; };
struct NonFiniteInput : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct VersionMismatch : Error { using Error::Error; };
struct CorruptModel : Error { using Error::Error; };

// feature selection
struct BadK : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

// evaluation
struct LengthMismatch : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct OneClassOnly : Error { using Error::Error; };

}  // namespace antispoof
