#pragma once

#include <stdexcept>
#include <string>

namespace odeforge {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define ODEFORGE_ERROR(Name)                                              \
    struct Name : Error {                                                 \
        explicit Name(const std::string& what = #Name) : Error(what) {}   \
    }

// ffcore
ODEFORGE_ERROR(FieldMismatch);
ODEFORGE_ERROR(NonInvertibleLeadingTerm);
ODEFORGE_ERROR(NotPrime);
ODEFORGE_ERROR(FormatError);

// guess
ODEFORGE_ERROR(NoAnnihilatorFound);
ODEFORGE_ERROR(InsufficientTerms);
ODEFORGE_ERROR(NoSolutionFound);
ODEFORGE_ERROR(DegenerateFit);
ODEFORGE_ERROR(SeedTooShort);

struct IndicialObstruction : Error {
    long index;
    explicit IndicialObstruction(long n)
        : Error("IndicialObstruction(" + std::to_string(n) + ")"), index(n) {}
};

// reconstruct
ODEFORGE_ERROR(NoConsistentK);
ODEFORGE_ERROR(NoRationalFound);
ODEFORGE_ERROR(InsufficientSamples);

// opalgebra
ODEFORGE_ERROR(SeriesTooShort);
ODEFORGE_ERROR(ZeroFunction);
ODEFORGE_ERROR(BadReduction);
ODEFORGE_ERROR(PointMismatch);

// localfrob
ODEFORGE_ERROR(NotComputable);
ODEFORGE_ERROR(DepthBudgetExceeded);
ODEFORGE_ERROR(NoSplitRoot);
ODEFORGE_ERROR(NoAnnihilator);

// continuation
ODEFORGE_ERROR(PrecisionError);
ODEFORGE_ERROR(DiskMismatch);
ODEFORGE_ERROR(TooFewTerms);
ODEFORGE_ERROR(NoStableRational);
ODEFORGE_ERROR(FrameOutOfRange);
ODEFORGE_ERROR(EvenWinding);
ODEFORGE_ERROR(ModelMismatch);
ODEFORGE_ERROR(NoRoot);
ODEFORGE_ERROR(BadMap);

struct IllConditioned : Error {
    double achieved_digits;
    explicit IllConditioned(double digits)
        : Error("IllConditioned(achieved " + std::to_string(digits) + " digits)"),
          achieved_digits(digits) {}
};

// cli
ODEFORGE_ERROR(ConfigError);

#undef ODEFORGE_ERROR

}  // namespace odeforge
