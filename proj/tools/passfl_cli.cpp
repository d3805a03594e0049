// placeholder during bring-up; replaced by the real CLI below
int main() { return 0; }
