use super::EnrichError;

/// QuadClass per CAMEO root 01..=20. 0 neutral, 1 verbal cooperation,
/// 2 material cooperation, 3 verbal conflict, 4 material conflict.
/// Not a linear slicing: 16 (reduce relations) is verbal conflict.
const QUAD_BY_ROOT: [u8; 20] = [0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3, 3, 3, 4, 4, 3, 4, 4, 4, 4];

pub fn quad_class(root_code: &str) -> Result<u8, EnrichError> {
    let unknown = || EnrichError::UnknownRoot(root_code.to_owned());
    if root_code.len() != 2 || !root_code.bytes().all(|b| b.is_ascii_digit()) {
        return Err(unknown());
    }
    let root: usize = root_code.parse().map_err(|_| unknown())?;
    if !(1..=20).contains(&root) {
        return Err(unknown());
    }
    Ok(QUAD_BY_ROOT[root - 1])
}
