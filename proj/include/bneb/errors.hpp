#ifndef BNEB_ERRORS_HPP
#define BNEB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bneb {

/// Coarse error class; the CLI maps each class onto an exit code.
enum class ErrorClass {
	Usage,       // bad flags or arguments
	Validation,  // malformed input files, shapes, domains
	Numerical,   // zero-probability evidence and friends
};

class Error : public std::runtime_error {
public:
	Error(ErrorClass cls, const std::string& kind, const std::string& what)
		: std::runtime_error(kind + ": " + what), class_(cls), kind_(kind) {}

	ErrorClass error_class() const noexcept { return class_; }
	const std::string& kind() const noexcept { return kind_; }

private:
	ErrorClass class_;
	std::string kind_;
};

#define BNEB_DEFINE_ERROR(Name, Class)                                   \
	class Name : public Error {                                          \
	public:                                                              \
		explicit Name(const std::string& what)                           \
			: Error(ErrorClass::Class, #Name, what) {}                   \
	};

// model
BNEB_DEFINE_ERROR(CycleError, Validation)
BNEB_DEFINE_ERROR(UnknownVariable, Validation)
BNEB_DEFINE_ERROR(UnknownState, Validation)
BNEB_DEFINE_ERROR(DuplicateVariable, Validation)
BNEB_DEFINE_ERROR(ArityMismatch, Validation)
BNEB_DEFINE_ERROR(RowNotNormalized, Validation)
BNEB_DEFINE_ERROR(NegativeEntry, Validation)
BNEB_DEFINE_ERROR(ShapeMismatch, Validation)
BNEB_DEFINE_ERROR(ParseError, Validation)
BNEB_DEFINE_ERROR(InvalidQuery, Validation)

// dirichlet
BNEB_DEFINE_ERROR(IncompleteRecord, Validation)
BNEB_DEFINE_ERROR(NonPositiveAlpha, Validation)

// inference
BNEB_DEFINE_ERROR(IncompleteAssignment, Validation)
BNEB_DEFINE_ERROR(StateSpaceTooLarge, Validation)
BNEB_DEFINE_ERROR(ZeroEvidenceProbability, Numerical)
BNEB_DEFINE_ERROR(ZeroParameter, Numerical)

// errorbars / montecarlo
BNEB_DEFINE_ERROR(OutOfDomain, Validation)
BNEB_DEFINE_ERROR(PreconditionViolation, Validation)
BNEB_DEFINE_ERROR(EmptyEvidenceSupport, Numerical)
BNEB_DEFINE_ERROR(NegativeContribution, Numerical)
BNEB_DEFINE_ERROR(DegenerateSample, Numerical)

// experiments
BNEB_DEFINE_ERROR(TooManyLinks, Validation)
BNEB_DEFINE_ERROR(TooManyVariables, Validation)
BNEB_DEFINE_ERROR(DivisionByZero, Numerical)
BNEB_DEFINE_ERROR(ConfigError, Validation)

#undef BNEB_DEFINE_ERROR

}  // namespace bneb

#endif  // BNEB_ERRORS_HPP
