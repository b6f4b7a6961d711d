#pragma once

#include <stdexcept>
#include <string>

namespace replab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidAlgebraError : public Error { public: using Error::Error; };
class ShapeError : public Error { public: using Error::Error; };
class DivergenceError : public Error { public: using Error::Error; };
class NotInvertibleError : public Error { public: using Error::Error; };

/// s^N is the identity on the search box; the orbits form a continuum.
class DegenerateMapError : public Error { public: using Error::Error; };

class NotPeriodicError : public Error { public: using Error::Error; };
class WrongOrderError : public Error { public: using Error::Error; };
class NonPrimitiveError : public Error { public: using Error::Error; };
class InvalidOrbitError : public Error { public: using Error::Error; };
class InvalidStringError : public Error { public: using Error::Error; };
class NotARepresentationError : public Error { public: using Error::Error; };
class PreconditionError : public Error { public: using Error::Error; };
class UnsupportedRepresentationError : public Error { public: using Error::Error; };
class DecompositionFailedError : public Error { public: using Error::Error; };

/// Malformed or unreadable interchange file.
class FormatError : public Error { public: using Error::Error; };

} // namespace replab
