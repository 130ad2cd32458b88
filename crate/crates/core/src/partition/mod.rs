//! The real plane for `0 < c < 1/4`: the rectangle partition, certified
//! transitions between its pieces, itineraries and limit classification.

pub mod certify;
pub mod exact;
pub mod limits;
pub mod regions;

pub use certify::{
    certify_inclusion, product_bound_holds, rect_image_bbox, transition_inclusions, verify_transition_tables,
    CertStatus, Inclusion, InclusionCertificate, LeafRecord, TransitionReport, DEFAULT_MAX_DEPTH,
};
pub use limits::{
    BackwardLimitClass, Itinerary, ItineraryEnd, LimitClass, RealPartition, CONFIRM_STEPS, DEFAULT_LIMIT_TOL,
};
pub use regions::{build_regions, locate, LabeledRect, Region, XInterval};
