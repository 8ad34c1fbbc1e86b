#pragma once

#include <stdexcept>
#include <string>

namespace cvxcone {

// Grid construction or operator assembly on too few nodes.
class InvalidGrid : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input outside the closed-form formula's domain of validity.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSpec : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidProblem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OracleTooLarge : public std::length_error {
public:
    using std::length_error::length_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cvxcone
