/// Character trie mapping pieces to token ids.
#[derive(Debug, Clone, Default)]
pub(crate) struct Trie {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Default)]
struct Node {
    // sorted by char
    children: Vec<(char, u32)>,
    value: Option<u32>,
}

impl Trie {
    pub fn new() -> Self {
        Self {
            nodes: vec![Node::default()],
        }
    }

    pub fn insert(&mut self, key: &str, value: u32) {
        let mut node = 0usize;
        for c in key.chars() {
            node = match self.nodes[node].children.binary_search_by_key(&c, |e| e.0) {
                Ok(i) => self.nodes[node].children[i].1 as usize,
                Err(i) => {
                    let next = self.nodes.len() as u32;
                    self.nodes.push(Node::default());
                    self.nodes[node].children.insert(i, (c, next));
                    next as usize
                }
            };
        }
        self.nodes[node].value = Some(value);
    }

    /// Calls `f(len, value)` for every stored key that is a prefix of
    /// `chars`, `len` counted in chars, shortest first.
    pub fn common_prefixes(&self, chars: impl Iterator<Item = char>, mut f: impl FnMut(usize, u32)) {
        let mut node = 0usize;
        for (i, c) in chars.enumerate() {
            match self.nodes[node].children.binary_search_by_key(&c, |e| e.0) {
                Ok(k) => node = self.nodes[node].children[k].1 as usize,
                Err(_) => return,
            }
            if let Some(v) = self.nodes[node].value {
                f(i + 1, v);
            }
        }
    }
}
