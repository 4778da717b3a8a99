#pragma once

#include <stdexcept>
#include <string>

namespace logmink {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geometry kernel
struct UnboundedBody : Error { using Error::Error; };      // directions do not span the space
struct DegenerateBody : Error { using Error::Error; };     // body collapsed below the volume floor
struct OriginNotInterior : Error { using Error::Error; };  // nonpositive support value where positivity is required
struct SingularMap : Error { using Error::Error; };        // |det| below the singularity floor
struct ZeroDirection : Error { using Error::Error; };      // zero vector where a direction is required
struct NotComplementary : Error { using Error::Error; };   // subspace pair fails to decompose the space
struct LiftDegenerate : Error { using Error::Error; };     // oblique lift between subspaces is near-singular

// measures
struct ZeroMass : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };
struct EmptyMeasure : Error { using Error::Error; };
struct VectorOutsideSubspace : Error { using Error::Error; };

// generic precondition failure (weight vectors, support sizes, ...)
struct PreconditionViolated : Error { using Error::Error; };

// serialization: malformed or inconsistent input files
struct ParseError : Error { using Error::Error; };

}  // namespace logmink
