#pragma once

#include <stdexcept>
#include <string>

namespace ltcoin {

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DegenerateGeometry : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InternalConsistency : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class Unsupported : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class UndefinedRate : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CertificationFailure : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

}  // namespace ltcoin
