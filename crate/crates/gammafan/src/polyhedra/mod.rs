pub mod cone;
pub mod fan;
pub mod farkas;
pub mod polyhedron;
pub mod separate;
pub mod thin;

pub use cone::{common_face_test, intersect, is_face, Cone, HomFunctional, Point};
pub use fan::{fan_from_max, is_complete, pullback, Ambient, CompletenessReport, Fan, FreeFacet};
pub use farkas::{farkas_classical, farkas_rational, rational_point, FarkasCertificate, Ineq};
pub use polyhedron::{boundary_edge_through, dehomogenize, homogenize, PolyhedralComplex, Polyhedron};
pub use separate::{separate, separate_cones, verify_separation, SeparationCase};
pub use thin::thin_rational_cone;
