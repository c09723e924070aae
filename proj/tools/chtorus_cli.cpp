// Placeholder main; subcommands are added with the modules.
int main() { return 0; }
