use serde::{Deserialize, Serialize};

/// A URI split around its host labels.
///
/// `to_uri()` reassembles the original text, except that the host is
/// lowercased.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HostParts {
    pub scheme: String,
    /// `user@` prefix including the `@`, usually empty.
    pub userinfo: String,
    pub subdomain: String,
    pub second_level: String,
    pub top_level: String,
    /// `:port` suffix including the colon, usually empty.
    pub port: String,
    /// Everything after the authority: path, query and fragment.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HostError {
    #[error("URI has no scheme: {0:?}")]
    NoScheme(String),
    #[error("URI has no host: {0:?}")]
    NoHost(String),
}

impl HostParts {
    pub fn host(&self) -> String {
        let mut host = String::new();
        for label in [&self.subdomain, &self.second_level, &self.top_level] {
            if label.is_empty() {
                continue;
            }
            if !host.is_empty() {
                host.push('.');
            }
            host.push_str(label);
        }
        host
    }

    /// Host labels in order, lowercased.
    pub fn labels(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = if self.subdomain.is_empty() {
            Vec::new()
        } else {
            self.subdomain.split('.').collect()
        };
        if !self.second_level.is_empty() {
            labels.push(&self.second_level);
        }
        labels.push(&self.top_level);
        labels
    }

    pub fn to_uri(&self) -> String {
        format!(
            "{}://{}{}{}{}",
            self.scheme,
            self.userinfo,
            self.host(),
            self.port,
            self.path
        )
    }

    /// Same URI with the host replaced.
    pub fn with_host(&self, host: &str) -> String {
        format!("{}://{}{}{}{}", self.scheme, self.userinfo, host, self.port, self.path)
    }
}

/// Splits a hierarchical URI into scheme, host labels and the remainder.
///
/// The top level is the final dot-separated label, the second level the label
/// before it, and the subdomain everything in front.
pub fn split_host(uri: &str) -> Result<HostParts, HostError> {
    let colon = uri.find(':').ok_or_else(|| HostError::NoScheme(uri.to_string()))?;
    let scheme = &uri[..colon];
    let scheme_ok = scheme
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic())
        && scheme.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    if !scheme_ok {
        return Err(HostError::NoScheme(uri.to_string()));
    }
    let after = uri[colon + 1..]
        .strip_prefix("//")
        .ok_or_else(|| HostError::NoHost(uri.to_string()))?;
    let auth_end = after.find(['/', '?', '#']).unwrap_or(after.len());
    let (authority, path) = after.split_at(auth_end);
    let (userinfo, hostport) = match authority.rfind('@') {
        Some(at) => authority.split_at(at + 1),
        None => ("", authority),
    };
    let (host, port) = if hostport.starts_with('[') {
        match hostport.find(']') {
            Some(end) => hostport.split_at(end + 1),
            None => (hostport, ""),
        }
    } else {
        match hostport.rfind(':') {
            Some(c) => hostport.split_at(c),
            None => (hostport, ""),
        }
    };
    if host.is_empty() {
        return Err(HostError::NoHost(uri.to_string()));
    }
    let host = host.to_ascii_lowercase();
    let mut labels: Vec<&str> = host.split('.').collect();
    let top_level = labels.pop().unwrap_or_default().to_string();
    let second_level = labels.pop().unwrap_or_default().to_string();
    Ok(HostParts {
        scheme: scheme.to_string(),
        userinfo: userinfo.to_string(),
        subdomain: labels.join("."),
        second_level,
        top_level,
        port: port.to_string(),
        path: path.to_string(),
    })
}
