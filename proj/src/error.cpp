#include "stunmix/error.hpp"

namespace stunmix {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::SimplexViolation: return "SimplexViolation";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
        case ErrorKind::EmptyTestSet: return "EmptyTestSet";
        case ErrorKind::EmptyDataset: return "EmptyDataset";
        case ErrorKind::NotDivisible: return "NotDivisible";
        case ErrorKind::AllNoData: return "AllNoData";
        case ErrorKind::AlignmentMismatch: return "AlignmentMismatch";
        case ErrorKind::TooFewBlocks: return "TooFewBlocks";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Io: return "Io";
        case ErrorKind::Format: return "Format";
    }
    return "Unknown";
}

}  // namespace stunmix
