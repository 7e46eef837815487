#pragma once

#include <stdexcept>
#include <string>

namespace progseg {

// Base for all toolkit errors. Subclasses map 1:1 onto the failure kinds
// surfaced by the public operations so callers can catch them selectively.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define PROGSEG_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                      \
    public:                                                          \
        explicit Name(const std::string& msg) : Error(msg) {}        \
    }

PROGSEG_DEFINE_ERROR(IoError);
PROGSEG_DEFINE_ERROR(CorruptFile);
PROGSEG_DEFINE_ERROR(MissingBand);
PROGSEG_DEFINE_ERROR(DimensionMismatch);
PROGSEG_DEFINE_ERROR(DegenerateRange);
PROGSEG_DEFINE_ERROR(ImageSmallerThanGrid);
PROGSEG_DEFINE_ERROR(IndivisibleDimensions);
PROGSEG_DEFINE_ERROR(TooFewTiles);
PROGSEG_DEFINE_ERROR(UnsupportedBackbone);
PROGSEG_DEFINE_ERROR(BandSubsetViolation);
PROGSEG_DEFINE_ERROR(ShapeMismatch);
PROGSEG_DEFINE_ERROR(ChannelMismatch);
PROGSEG_DEFINE_ERROR(NonDivisibleSize);
PROGSEG_DEFINE_ERROR(SpecMismatch);
PROGSEG_DEFINE_ERROR(MissingWeight);
PROGSEG_DEFINE_ERROR(OutOfRangeClass);
PROGSEG_DEFINE_ERROR(NoClassesPresent);
PROGSEG_DEFINE_ERROR(SizeMismatch);
PROGSEG_DEFINE_ERROR(EmptyDataset);
PROGSEG_DEFINE_ERROR(MissingPatchSet);
PROGSEG_DEFINE_ERROR(OverfullScene);
PROGSEG_DEFINE_ERROR(NoRunsFound);
PROGSEG_DEFINE_ERROR(ConfigError);
PROGSEG_DEFINE_ERROR(InvalidArgument);

#undef PROGSEG_DEFINE_ERROR

}  // namespace progseg
