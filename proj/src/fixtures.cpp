namespace witt {}
