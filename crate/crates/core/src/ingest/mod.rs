//! LIBSVM parsing, preprocessing and model persistence.

mod libsvm;
mod model_file;
mod preprocess;

pub use libsvm::{parse_libsvm, parse_libsvm_str, read_libsvm, RawDataset};
pub use model_file::{read_model, write_model, ModelFile, SolverMeta, FORMAT_VERSION};
pub use preprocess::{preprocess, FeatureMeta, Preprocessed};
