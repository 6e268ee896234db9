use rand::Rng;

/// Length of a library key, matching the ids issued by ADS.
pub const KEY_LEN: usize = 22;

const ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

/// A fresh random key: 22 characters from the URL-safe base64 alphabet.
pub fn generate_key<R: Rng + ?Sized>(rng: &mut R) -> String {
    (0..KEY_LEN)
        .map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())] as char)
        .collect()
}

pub fn is_valid_key(key: &str) -> bool {
    key.len() == KEY_LEN && key.chars().all(crate::query::is_library_key_char)
}
