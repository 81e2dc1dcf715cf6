#pragma once

#include <stdexcept>
#include <string>

namespace docsource {

// Base class for all pipeline errors. Subcommands map these to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct CorruptData : Error { using Error::Error; };
struct ConstantImage : Error { using Error::Error; };
struct BadPatchSize : Error { using Error::Error; };
struct BadConfig : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct DegenerateBatch : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct BadFormat : Error { using Error::Error; };
struct VersionMismatch : Error { using Error::Error; };
struct NoComponents : Error { using Error::Error; };
struct BadSplitSpec : Error { using Error::Error; };
struct ManifestError : Error { using Error::Error; };
struct LabelOutOfRange : Error { using Error::Error; };
struct LayoutOverflow : Error { using Error::Error; };
struct UpscaleRefused : Error { using Error::Error; };

} // namespace docsource
