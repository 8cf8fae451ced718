// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace pirlab {

enum class Errc {
    NonSquare,
    Singular,
    ShapeMismatch,
    BadParams,
    LengthNotDivisible,
    UnknownScheme,
    DecodeFailure,
    SearchExhausted,
    NotUnique,
    NotEnumerable,
    UnderPowered,
    AsymmetryDetected,
    IoError,
    SchemaVersionMismatch,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace pirlab
