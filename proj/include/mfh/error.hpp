#pragma once

#include <stdexcept>
#include <string>

namespace mfh {

enum class Err {
    // audio-io
    NotFound,
    UnsupportedFormat,
    CorruptHeader,
    SignalTooShort,
    // dsp
    FrameTooShort,
    NonPowerOfTwoLength,
    SilentFrame,
    InvalidBand,
    // encoding
    EmptyTrack,
    InvalidRange,
    OutOfRange,
    UnknownLabel,
    DuplicateClassCode,
    // network
    InvalidDimensions,
    DimensionMismatch,
    EmptyPatternSet,
    // eval
    EmptyManifest,
    WidthMismatch,
    EmptyRows,
    EmptyPredictions,
    EmptyLog,
    // files / config
    ParseError,
    InvalidConfig,
    InvalidArgument,
};

class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Err code() const noexcept { return code_; }

private:
    Err code_;
};

} // namespace mfh
