use std::fs;
use std::io;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

/// Prompt templates. `{{name}}` placeholders are filled by [`render`].
/// Defaults are compiled in from `prompts/`; a directory of same-named
/// files can override any subset of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplates {
    pub extract_system: String,
    pub extract_user: String,
    pub json_reminder: String,
    pub generate_system: String,
    pub generate_user: String,
    pub rules: String,
    pub grammar: String,
    pub repair: String,
    pub summary_system: String,
    pub summary_user: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates {
            extract_system: include_str!("../../prompts/extract.system.txt").into(),
            extract_user: include_str!("../../prompts/extract.user.txt").into(),
            json_reminder: include_str!("../../prompts/json_reminder.txt").into(),
            generate_system: include_str!("../../prompts/generate.system.txt").into(),
            generate_user: include_str!("../../prompts/generate.user.txt").into(),
            rules: include_str!("../../prompts/rules.txt").into(),
            grammar: include_str!("../../prompts/grammar.txt").into(),
            repair: include_str!("../../prompts/repair.txt").into(),
            summary_system: include_str!("../../prompts/summary.system.txt").into(),
            summary_user: include_str!("../../prompts/summary.user.txt").into(),
        }
    }
}

impl PromptTemplates {
    pub fn from_dir(dir: &Path) -> io::Result<Self> {
        let mut t = Self::default();
        let slots: [(&str, &mut String); 10] = [
            ("extract.system.txt", &mut t.extract_system),
            ("extract.user.txt", &mut t.extract_user),
            ("json_reminder.txt", &mut t.json_reminder),
            ("generate.system.txt", &mut t.generate_system),
            ("generate.user.txt", &mut t.generate_user),
            ("rules.txt", &mut t.rules),
            ("grammar.txt", &mut t.grammar),
            ("repair.txt", &mut t.repair),
            ("summary.system.txt", &mut t.summary_system),
            ("summary.user.txt", &mut t.summary_user),
        ];
        for (file, slot) in slots {
            let path = dir.join(file);
            if path.exists() {
                *slot = fs::read_to_string(path)?;
            }
        }
        Ok(t)
    }
}

/// Substitutes `{{name}}` placeholders. Unknown placeholders are left as is.
/// Values are inserted in a single pass, so a value containing `{{...}}`
/// is never expanded again.
pub fn render(template: &str, values: &[(&str, &str)]) -> String {
    static PLACEHOLDER: OnceLock<Regex> = OnceLock::new();
    let re = PLACEHOLDER.get_or_init(|| Regex::new(r"\{\{(\w+)\}\}").expect("static regex"));
    let out = re.replace_all(template, |caps: &regex::Captures<'_>| {
        let name = &caps[1];
        values.iter().find(|(n, _)| *n == name).map_or_else(|| caps[0].to_string(), |(_, v)| v.to_string())
    });
    out.trim_end().to_string()
}
