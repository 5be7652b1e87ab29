//! Detector evaluation: classification scores, saliency localization
//! scores, and mask-ratio stratification over ingested detector outputs.

pub mod classification;
pub mod localization;
pub mod manifest;
pub mod strata;

pub use classification::{
    classification_metrics, roc_auc, ClassificationReport, ConfusionMatrix, DetectionRecord, Label,
    DEFAULT_THRESHOLD,
};
pub use localization::{
    average_precision, iou, localization_metrics, ItemLocalization, LocalizationConfig,
    LocalizationReport, SaliencyMap, LOCALIZATION_SIZE, SALIENCY_THRESHOLD,
};
pub use manifest::{load_manifest, resolve_path, ManifestRow};
pub use strata::{bin_index, stratify_by_mask_ratio, validate_edges, StratumReport, StratumStatus, DEFAULT_EDGES};
