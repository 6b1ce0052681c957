#pragma once

#include <stdexcept>
#include <string>

namespace igs {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define IGS_DEFINE_ERROR(Name)                          \
    struct Name : Error {                               \
        using Error::Error;                             \
        Name() : Error(#Name) {}                        \
    }

// geometry
IGS_DEFINE_ERROR(NonPositiveDepth);
IGS_DEFINE_ERROR(NonPositiveInverseDepth);

// frame graph
IGS_DEFINE_ERROR(InsufficientKeyframes);

// flow provider
IGS_DEFINE_ERROR(UnknownFrame);
IGS_DEFINE_ERROR(NoValidPixels);

// dba
IGS_DEFINE_ERROR(EmptyGraph);
IGS_DEFINE_ERROR(SingularSystem);
IGS_DEFINE_ERROR(NotPositiveDefinite);

// mapping
IGS_DEFINE_ERROR(DegenerateLevel);
IGS_DEFINE_ERROR(EmptyMask);

// pipeline / evaluation
IGS_DEFINE_ERROR(DatasetError);
IGS_DEFINE_ERROR(NoEvalFrames);
IGS_DEFINE_ERROR(TooFewPoses);

// io
IGS_DEFINE_ERROR(MissingIndex);
IGS_DEFINE_ERROR(InvalidSpec);

#undef IGS_DEFINE_ERROR

// Parse error carrying the 1-based line number of the offending line.
struct MalformedLine : Error {
    int line;
    explicit MalformedLine(int line_number, const std::string& what_arg = "malformed line")
        : Error(what_arg + " at line " + std::to_string(line_number)), line(line_number) {}
};

}  // namespace igs
