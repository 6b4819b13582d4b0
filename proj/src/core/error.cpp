#include "cspace/core/error.hpp"

namespace cspace {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Parse: return "ParseError";
        case ErrorKind::Schema: return "SchemaError";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::EmptyColumn: return "EmptyColumn";
        case ErrorKind::EmptyResult: return "EmptyResult";
        case ErrorKind::EmptyCandidates: return "EmptyCandidates";
        case ErrorKind::Spec: return "SpecError";
        case ErrorKind::Key: return "KeyError";
        case ErrorKind::Impute: return "ImputeError";
        case ErrorKind::Input: return "InputError";
        case ErrorKind::Shape: return "ShapeError";
        case ErrorKind::UndefinedRsd: return "UndefinedRSD";
        case ErrorKind::UndefinedMape: return "UndefinedMAPE";
        case ErrorKind::Rank: return "RankError";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::TooManyFeatures: return "TooManyFeatures";
        case ErrorKind::UndefinedCorrelation: return "UndefinedCorrelation";
        case ErrorKind::TooManyKeyAttrs: return "TooManyKeyAttrs";
        case ErrorKind::Perplexity: return "PerplexityError";
        case ErrorKind::Geometry: return "GeometryError";
        case ErrorKind::Assignment: return "AssignmentError";
        case ErrorKind::Internal: return "InternalError";
    }
    return "Error";
}

}  // namespace cspace
